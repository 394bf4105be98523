#pragma once

#include "gsure/chebyshev.hpp"
#include "gsure/error.hpp"
#include "gsure/frame.hpp"
#include "gsure/generators.hpp"
#include "gsure/graph.hpp"
#include "gsure/io.hpp"
#include "gsure/laplacian.hpp"
#include "gsure/partition.hpp"
#include "gsure/pipeline.hpp"
#include "gsure/privacy.hpp"
#include "gsure/signals.hpp"
#include "gsure/spectral_frame.hpp"
#include "gsure/sure_mc.hpp"
#include "gsure/thresholding.hpp"
