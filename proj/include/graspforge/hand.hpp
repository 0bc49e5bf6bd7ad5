#pragma once

#include "graspforge/hand/asset.hpp"
#include "graspforge/hand/io.hpp"
#include "graspforge/hand/kinematics.hpp"
#include "graspforge/hand/mirror.hpp"
#include "graspforge/hand/test_asset.hpp"
