#pragma once

#include "graspforge/motion/handover.hpp"
#include "graspforge/motion/io.hpp"
