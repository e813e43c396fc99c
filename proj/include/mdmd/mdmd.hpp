#pragma once

#include "mdmd/dmd.hpp"
#include "mdmd/ensemble.hpp"
#include "mdmd/error.hpp"
#include "mdmd/io.hpp"
#include "mdmd/metrics.hpp"
#include "mdmd/observables.hpp"
#include "mdmd/rng.hpp"
#include "mdmd/solver.hpp"
#include "mdmd/wavelet.hpp"
