#pragma once

// Umbrella header.

#include "becl/hermite.hpp"
#include "becl/potential.hpp"
#include "becl/scaling.hpp"
#include "becl/fft.hpp"
#include "becl/nls2d.hpp"
#include "becl/nls3d.hpp"
#include "becl/manybody/state.hpp"
#include "becl/manybody/operator.hpp"
#include "becl/manybody/density.hpp"
#include "becl/manybody/diagnostics.hpp"
#include "becl/manybody/sobolev.hpp"
#include "becl/hierarchy/observable.hpp"
#include "becl/hierarchy/bbgky.hpp"
#include "becl/hierarchy/collision.hpp"
#include "becl/hierarchy/gp_residual.hpp"
#include "becl/hierarchy/mollifier.hpp"
#include "becl/lab/config.hpp"
#include "becl/lab/io.hpp"
#include "becl/lab/snapshot.hpp"
#include "becl/lab/plot.hpp"
#include "becl/lab/experiments.hpp"
#include "becl/lab/sweep.hpp"
#include "becl/lab/report.hpp"
