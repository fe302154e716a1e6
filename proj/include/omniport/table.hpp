#pragma once

#include <string>

#include "omniport/sweep.hpp"

// Result serialization. CSV carries 17 significant digits so values survive
// a round trip through text; infinities are spelled "inf" / "-inf" in both
// formats (JSON has no literal for them).

namespace omniport {

// thrown on malformed scenario or result files; the command line tool maps
// this to exit code 1
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_double(double v);  // %.17g with the inf convention

std::string to_csv(const SweepTable& table);

// schema "omniport.table.v1": axes, metric columns, row-major records
std::string to_json(const SweepTable& table, const std::string& scenario_hash);

// inverse of to_json; the returned hash matches the embedded field
SweepTable table_from_json(const std::string& text, std::string* hash = nullptr);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace omniport
