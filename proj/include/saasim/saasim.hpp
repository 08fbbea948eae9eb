#pragma once

// Everything except the YAML loader (saasim/config.hpp), which needs yaml-cpp.

#include "saasim/centrality.hpp"
#include "saasim/community.hpp"
#include "saasim/detector.hpp"
#include "saasim/error.hpp"
#include "saasim/experiment.hpp"
#include "saasim/routers.hpp"
#include "saasim/simulation.hpp"
#include "saasim/social_graph.hpp"
#include "saasim/social_metrics.hpp"
#include "saasim/synthetic.hpp"
#include "saasim/trace.hpp"
#include "saasim/types.hpp"
