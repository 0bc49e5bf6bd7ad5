#pragma once

#include "graspforge/geometry/bvh.hpp"
#include "graspforge/geometry/kdtree.hpp"
#include "graspforge/geometry/mesh.hpp"
#include "graspforge/geometry/primitives.hpp"
#include "graspforge/geometry/queries.hpp"
#include "graspforge/geometry/sampling.hpp"
