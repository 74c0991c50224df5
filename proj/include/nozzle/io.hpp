#pragma once

#include <initializer_list>
#include <string>

namespace nozzle {

// Writes via a temp file in the same directory, then renames. Re-running
// with identical inputs reproduces identical bytes.
void write_file_atomic(const std::string& path, const std::string& content);

// One CSV row, full round-trip precision, trailing newline.
std::string format_csv_row(std::initializer_list<double> values);

std::string format_double(double v);

}  // namespace nozzle
