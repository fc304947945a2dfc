#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hawkes_ld {

/// Shortest round-trip decimal form ("%.17g"); infinities print as "inf"/"-inf", NaN as "nan".
std::string format_double(double v);

/// Writes one CSV row of already formatted fields, LF terminated.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace hawkes_ld
