#pragma once

#include "approxwidths/approx_spaces.hpp"
#include "approxwidths/compactness.hpp"
#include "approxwidths/error.hpp"
#include "approxwidths/expr.hpp"
#include "approxwidths/minimax.hpp"
#include "approxwidths/q_compactness.hpp"
#include "approxwidths/schemes.hpp"
#include "approxwidths/sequences.hpp"
#include "approxwidths/spaces.hpp"
#include "approxwidths/subspace_width.hpp"
