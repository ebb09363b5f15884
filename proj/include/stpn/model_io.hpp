#pragma once

#include <string>

#include "stpn/detector.hpp"

namespace stpn {

/// Pipeline model file: one JSON document holding the partitioner, the
/// pattern count matrices and thresholds, the RBM parameters, the baseline
/// free-energy statistics, the detection threshold and the config echo.
void save_pipeline(const PipelineModel& model, const std::string& path);
PipelineModel load_pipeline(const std::string& path);

std::string pipeline_to_json(const PipelineModel& model);
PipelineModel pipeline_from_json(const std::string& json_text);

}  // namespace stpn
