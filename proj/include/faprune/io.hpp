#pragma once

#include <string>

namespace faprune {

// Shortest round-trip decimal formatting; keeps CSV and JSONL output stable
// regardless of which path produced the number.
std::string fmt_num(double v);

// Write-temp-then-rename so interrupted runs never leave truncated files.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path); // throws FormatError

} // namespace faprune
