#pragma once

#include "numerics.hpp"
#include "pst.hpp"
#include "statevector.hpp"
#include "sampling.hpp"
#include "ghz_ising.hpp"
#include "isoflow.hpp"
#include "synthesis.hpp"
#include "cloning.hpp"
#include "graphs.hpp"
#include "io.hpp"
