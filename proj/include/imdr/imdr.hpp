#pragma once

#include "imdr/correlate.hpp"
#include "imdr/csv.hpp"
#include "imdr/data_model.hpp"
#include "imdr/errors.hpp"
#include "imdr/format.hpp"
#include "imdr/ingest.hpp"
#include "imdr/pipeline.hpp"
#include "imdr/render.hpp"
#include "imdr/run_config.hpp"
#include "imdr/stats.hpp"
#include "imdr/svg.hpp"
