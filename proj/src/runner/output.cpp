#include "mqc/runner/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "mqc/errors.hpp"

namespace mqc::runner {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // no negative zero
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& run_id,
                     const std::vector<std::string>& columns)
    : path_(path), columns_(columns.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot write " + path.string());
  out_ << "# manifest: manifest.json run_id=" << run_id << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::sep() {
  if (in_row_ == columns_) throw Error(path_.string() + ": too many fields in row");
  if (in_row_++) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double x) {
  sep();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(int x) {
  sep();
  char buf[16];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  out_.write(buf, r.ptr - buf);
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& x) {
  sep();
  out_ << x;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw Error(path_.string() + ": short row");
  out_ << '\n';
  in_row_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error("write failed: " + path_.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

namespace {

std::string esc(const std::string& s) {
  std::string r;
  for (char c : s) {
    if (c == '<') r += "&lt;";
    else if (c == '>') r += "&gt;";
    else if (c == '&') r += "&amp;";
    else r += c;
  }
  return r;
}

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 4);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<Series>& series, const std::string& run_id) {
  const double w = 640, h = 420, l = 70, r = 20, t = 40, b = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) {
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
  }
  if (!(x1 > x0)) x0 -= 1, x1 += 1;
  if (!(y1 > y0)) y0 -= 1, y1 += 1;
  auto px = [&](double x) { return l + (x - x0) / (x1 - x0) * (w - l - r); };
  auto py = [&](double y) { return h - b - (y - y0) / (y1 - y0) * (h - t - b); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\">\n";
  s += "<!-- manifest: manifest.json run_id=" + run_id + " -->\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + esc(title) + "</text>\n";
  s += "<rect x=\"" + fmt(l) + "\" y=\"" + fmt(t) + "\" width=\"" + fmt(w - l - r) + "\" height=\"" +
       fmt(h - t - b) + "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fmt(l) + "\" y=\"" + fmt(h - b + 16) + "\" font-size=\"11\">" + fmt(x0) + "</text>\n";
  s += "<text x=\"" + fmt(w - r) + "\" y=\"" + fmt(h - b + 16) + "\" font-size=\"11\" text-anchor=\"end\">" +
       fmt(x1) + "</text>\n";
  s += "<text x=\"" + fmt(l - 4) + "\" y=\"" + fmt(h - b) + "\" font-size=\"11\" text-anchor=\"end\">" +
       fmt(y0) + "</text>\n";
  s += "<text x=\"" + fmt(l - 4) + "\" y=\"" + fmt(t + 10) + "\" font-size=\"11\" text-anchor=\"end\">" +
       fmt(y1) + "</text>\n";
  s += "<text x=\"320\" y=\"" + fmt(h - 12) + "\" text-anchor=\"middle\" font-size=\"13\">" + esc(x_label) +
       "</text>\n";
  s += "<text x=\"16\" y=\"210\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 210)\">" +
       esc(y_label) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* c = colors[k % 6];
    s += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
      if (!std::isfinite(sr.y[i])) continue;
      s += fmt(px(sr.x[i])) + "," + fmt(py(sr.y[i])) + " ";
    }
    s += "\"/>\n";
    if (!sr.label.empty()) {
      s += "<text x=\"" + fmt(w - r - 6) + "\" y=\"" + fmt(t + 16 + 14.0 * static_cast<double>(k)) +
           "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + c + "\">" + esc(sr.label) + "</text>\n";
    }
  }
  s += "</svg>\n";
  write_text(path, s);
}

}  // namespace mqc::runner
