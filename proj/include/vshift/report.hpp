#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "vshift/diagnostics.hpp"
#include "vshift/montecarlo.hpp"

namespace vshift {

using Json = nlohmann::ordered_json;

/// CSV/JSON views of the reporting types. All numbers are written as exact
/// round-trip decimals so repeated runs compare byte for byte.

std::string shift_report_csv(const ShiftReport& report);
Json shift_report_json(const ShiftReport& report);

std::string consistency_csv(const ConsistencyReport& report);
Json consistency_json(const ConsistencyReport& report);

std::string sweep_rows_csv(const std::vector<SweepRow>& rows);
Json sweep_rows_json(const std::vector<SweepRow>& rows);

/// Writes `text` to `path` with LF endings, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace vshift
