#pragma once

#include "mogen/centrality.hpp"
#include "mogen/error.hpp"
#include "mogen/experiment.hpp"
#include "mogen/models.hpp"
#include "mogen/pathdata.hpp"
#include "mogen/report.hpp"
#include "mogen/rng.hpp"
#include "mogen/smells.hpp"
