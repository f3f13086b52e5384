#pragma once

#include "flexctl/config.hpp"
#include "flexctl/controller.hpp"
#include "flexctl/csv.hpp"
#include "flexctl/discretizer.hpp"
#include "flexctl/errors.hpp"
#include "flexctl/matseries.hpp"
#include "flexctl/plant.hpp"
#include "flexctl/scheduler.hpp"
#include "flexctl/simulator.hpp"
#include "flexctl/stability.hpp"
