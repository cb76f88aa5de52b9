#pragma once

#include "solnet/error.hpp"
#include "solnet/fock.hpp"
#include "solnet/hamiltonian.hpp"
#include "solnet/io.hpp"
#include "solnet/linalg.hpp"
#include "solnet/loss.hpp"
#include "solnet/metrology.hpp"
#include "solnet/parallel.hpp"
#include "solnet/semiclassical.hpp"
