#pragma once

// Umbrella header: pattern discovery, occurrence-set encoding and
// compression-distance classification for k-dimensional point sets.

#include "mtpkit/encoder.hpp"
#include "mtpkit/geometry.hpp"
#include "mtpkit/io.hpp"
#include "mtpkit/mtp.hpp"
#include "mtpkit/ncd.hpp"
#include "mtpkit/parallel.hpp"
#include "mtpkit/rational.hpp"
#include "mtpkit/transform.hpp"
