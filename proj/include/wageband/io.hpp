#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace wageband::io {

inline constexpr int kSignificantDigits = 12;

/// Locale-independent shortest-general representation with 12 significant
/// digits ("nan", "inf", "-inf" for non-finite values).
std::string format_number(double value);

/// The double nearest to `value` rounded to 12 significant digits, so that
/// shortest round-trip printers emit at most that many digits.
double round_significant(double value);

/// Minimal CSV emitter: fixed header, numeric or textual cells, '\n' line ends.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  CsvWriter& cell(double value);
  CsvWriter& cell(std::string_view text);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Writes `content` to `path`, creating parent directories. Throws
/// std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace wageband::io
