#pragma once

#include "graspforge/dataset/generate.hpp"
#include "graspforge/dataset/manifest.hpp"
#include "graspforge/dataset/pool.hpp"
#include "graspforge/dataset/sampling.hpp"
#include "graspforge/dataset/verdict.hpp"
