#pragma once

#include "whisker/beam.hpp"
#include "whisker/errors.hpp"
#include "whisker/experiment.hpp"
#include "whisker/features.hpp"
#include "whisker/fft.hpp"
#include "whisker/mlp.hpp"
#include "whisker/seed.hpp"
#include "whisker/terrain.hpp"
