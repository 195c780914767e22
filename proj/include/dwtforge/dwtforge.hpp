// Umbrella header.
#pragma once

#include "dwtforge/color.hpp"
#include "dwtforge/corpus.hpp"
#include "dwtforge/detect.hpp"
#include "dwtforge/error.hpp"
#include "dwtforge/forge.hpp"
#include "dwtforge/image.hpp"
#include "dwtforge/metrics.hpp"
#include "dwtforge/png_io.hpp"
#include "dwtforge/smooth.hpp"
#include "dwtforge/wavelet.hpp"
