#pragma once

#include "nlsim/checkpoint_io.hpp"
#include "nlsim/config.hpp"
#include "nlsim/diagnostics.hpp"
#include "nlsim/errors.hpp"
#include "nlsim/evolve.hpp"
#include "nlsim/exponents.hpp"
#include "nlsim/expression.hpp"
#include "nlsim/fft.hpp"
#include "nlsim/grid.hpp"
#include "nlsim/inequalities.hpp"
#include "nlsim/inhomogeneity.hpp"
#include "nlsim/littlewood_paley.hpp"
#include "nlsim/model.hpp"
#include "nlsim/ndjson.hpp"
#include "nlsim/norms.hpp"
#include "nlsim/profiles.hpp"
#include "nlsim/propagator.hpp"
#include "nlsim/runner.hpp"
#include "nlsim/spacetime.hpp"
#include "nlsim/trajectory_analysis.hpp"
