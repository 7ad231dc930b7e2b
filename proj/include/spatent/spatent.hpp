#pragma once

#include "spatent/hermite.hpp"
#include "spatent/quadrature.hpp"
#include "spatent/regions.hpp"
#include "spatent/thermo.hpp"
#include "spatent/fock_basis.hpp"
#include "spatent/entanglement.hpp"
#include "spatent/oracle.hpp"
#include "spatent/sweep.hpp"
