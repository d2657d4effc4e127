#pragma once

// Umbrella header.

#include "rdflab/error.hpp"
#include "rdflab/dyadic.hpp"
#include "rdflab/fft.hpp"
#include "rdflab/signal.hpp"
#include "rdflab/signal_io.hpp"
#include "rdflab/collection_io.hpp"
#include "rdflab/operators.hpp"
#include "rdflab/maxflow.hpp"
#include "rdflab/tiles.hpp"
#include "rdflab/tile_analysis.hpp"
#include "rdflab/decompose.hpp"
#include "rdflab/trilinear.hpp"
#include "rdflab/certificates.hpp"
#include "rdflab/multiplier.hpp"
#include "rdflab/exponents.hpp"
#include "rdflab/generators.hpp"
#include "rdflab/search.hpp"
#include "rdflab/experiment.hpp"
#include "rdflab/verify.hpp"
