#pragma once

#include "specstat/ensembles.hpp"
#include "specstat/errors.hpp"
#include "specstat/level_file.hpp"
#include "specstat/linalg.hpp"
#include "specstat/models.hpp"
#include "specstat/pipeline.hpp"
#include "specstat/quadrature.hpp"
#include "specstat/ratio_stats.hpp"
#include "specstat/report_io.hpp"
#include "specstat/rng.hpp"
#include "specstat/spectrum.hpp"
