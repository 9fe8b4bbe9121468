#pragma once

#include <iosfwd>
#include <string>

#include "riskcut/core.hpp"

namespace riskcut {

/// Reads a `label,score` CSV. Labels -1 and 1 are taken as is, 0 maps to -1.
/// Throws DataError naming the 1-based line and field on a malformed row.
Dataset parse_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

/// Writes the same format with round-trip precision (17 significant digits).
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// 12 significant digits, '.' decimal separator, no locale.
std::string format_number(double value);

}  // namespace riskcut
