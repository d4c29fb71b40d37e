#pragma once

#include "heatcast/core_data.hpp"
#include "heatcast/features.hpp"
#include "heatcast/mlp.hpp"
#include "heatcast/model_io.hpp"
#include "heatcast/oa.hpp"
#include "heatcast/pipeline.hpp"
#include "heatcast/relevance.hpp"
#include "heatcast/report.hpp"
#include "heatcast/schedules.hpp"
#include "heatcast/selection.hpp"
#include "heatcast/synth.hpp"
