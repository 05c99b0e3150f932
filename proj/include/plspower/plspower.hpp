#pragma once

// Umbrella header for the plspower library: partial least squares
// regression/classification, permutation tests, a covariance-preserving
// Monte Carlo simulator, and power / sample-size estimation for 2-class
// PLS classification studies.

#include "plspower/csv_io.hpp"
#include "plspower/linalg.hpp"
#include "plspower/parallel.hpp"
#include "plspower/perm_test.hpp"
#include "plspower/pilot.hpp"
#include "plspower/pls.hpp"
#include "plspower/plsc.hpp"
#include "plspower/post_transform.hpp"
#include "plspower/power.hpp"
#include "plspower/preprocess.hpp"
#include "plspower/rng.hpp"
#include "plspower/simulate.hpp"
#include "plspower/svg.hpp"
#include "plspower/types.hpp"
