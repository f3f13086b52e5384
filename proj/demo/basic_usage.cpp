// Minimal library usage: one closed-loop run with the nominal motor, then a
// look at the last few logged steps.

#include <iostream>

#include "flexctl/flexctl.hpp"

int main() {
  flexctl::SimConfig cfg;
  cfg.schedule.seed = 7;
  cfg.duration = 3.0;

  const auto trace = flexctl::run(cfg);
  std::cout << "steps: " << trace.records.size() << '\n';
  for (std::size_t i = trace.records.size() - 3; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    std::cout << "t=" << r.t << " h=" << r.h_k << " theta=" << r.x.theta << " u=" << r.u
              << " k_E=" << r.k_E << '\n';
  }

  const auto d = flexctl::discretize(cfg.params, 0.11);
  std::cout << "F(0.11) =\n" << d.F << "\nG(0.11) = " << d.G.transpose() << '\n';
  return 0;
}
