#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace mqc::runner {

// 17 significant digits, '.' decimal point, no locale: equal doubles always
// print to equal bytes. Negative zero prints as 0.
std::string format_double(double x);

// Comma-separated table whose first line names the producing manifest:
// "# manifest: manifest.json run_id=<id>". Lines end in '\n'.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& run_id,
            const std::vector<std::string>& columns);

  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(int x);
  CsvWriter& operator<<(const std::string& x);
  void end_row();
  void close();

 private:
  void sep();

  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal line plot. Purely for inspection; nothing reads it back.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<Series>& series, const std::string& run_id);

// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mqc::runner
