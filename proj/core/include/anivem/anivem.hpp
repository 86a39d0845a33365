#pragma once

#include "anivem/geomcheck.hpp"
#include "anivem/ife.hpp"
#include "anivem/mesh.hpp"
#include "anivem/meshgen.hpp"
#include "anivem/problems.hpp"
#include "anivem/quadrature.hpp"
#include "anivem/solver.hpp"
#include "anivem/vem.hpp"
