#pragma once

#include "graspforge/grasp/adam.hpp"
#include "graspforge/grasp/config.hpp"
#include "graspforge/grasp/io.hpp"
#include "graspforge/grasp/losses.hpp"
#include "graspforge/grasp/optimize.hpp"
#include "graspforge/grasp/pregrasp.hpp"
#include "graspforge/grasp/request.hpp"
#include "graspforge/grasp/source.hpp"
