#include "rppg/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "rppg/error.hpp"

namespace rppg::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<char, 4> kRawMagic{'R', 'P', 'R', 'W'};
constexpr std::array<char, 4> kSpectrogramMagic{'R', 'P', 'S', 'G'};
constexpr std::size_t kRawHeaderSize = 32;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint64_t get_u64(const unsigned char* p) {
  return static_cast<std::uint64_t>(get_u32(p)) | static_cast<std::uint64_t>(get_u32(p + 4)) << 32;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Splits on commas and/or whitespace.
std::vector<std::string> split_fields(std::string line) {
  std::replace(line.begin(), line.end(), ',', ' ');
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string field; in >> field;) out.push_back(field);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, bool binary = false) {
  if (!fs::exists(path)) throw Error(ErrorCode::kInputMissing, "file not found: " + path.string());
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error(ErrorCode::kInputMissing, "cannot open " + path.string());
  return in;
}

fs::path axes_path(const fs::path& path) { return fs::path(path.string() + ".axes.txt"); }

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorCode::kInvalidArgument, "number formatting failed");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Landmarks

roi::LandmarkFrame parse_landmark_record(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("frame") || !j["frame"].is_number_integer()) {
    throw Error(ErrorCode::kParseError, "landmark record needs an integer \"frame\"");
  }
  roi::LandmarkFrame frame;
  frame.frame_index = j["frame"].get<std::int64_t>();
  if (j.contains("missing")) {
    if (!j["missing"].is_boolean()) {
      throw Error(ErrorCode::kParseError, "\"missing\" must be a boolean");
    }
    frame.missing = j["missing"].get<bool>();
  }
  if (!j.contains("points")) {
    if (frame.missing) return frame;
    throw Error(ErrorCode::kParseError, "landmark record needs \"points\"");
  }
  const json& points = j["points"];
  if (!points.is_array()) throw Error(ErrorCode::kParseError, "\"points\" must be an array");
  frame.points.reserve(points.size());
  for (const json& p : points) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Error(ErrorCode::kParseError, "each point must be [x, y]");
    }
    frame.points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return frame;
}

std::string format_landmark_record(const roi::LandmarkFrame& frame) {
  json j;
  j["frame"] = frame.frame_index;
  if (frame.missing) j["missing"] = true;
  json points = json::array();
  for (const auto& p : frame.points) points.push_back({p.x, p.y});
  j["points"] = std::move(points);
  return j.dump();
}

LandmarkReader::LandmarkReader(const fs::path& path) : path_(path), in_(open_in(path)) {}

std::optional<roi::LandmarkFrame> LandmarkReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (trim(line).empty()) continue;
    try {
      return parse_landmark_record(line);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError,
                  path_.string() + ":" + std::to_string(line_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

std::vector<roi::LandmarkFrame> read_landmarks(const fs::path& path) {
  LandmarkReader reader(path);
  std::vector<roi::LandmarkFrame> frames;
  while (auto frame = reader.next()) frames.push_back(std::move(*frame));
  return frames;
}

void write_landmarks(const fs::path& path, std::span<const roi::LandmarkFrame> frames) {
  auto out = open_out(path);
  for (const auto& frame : frames) out << format_landmark_record(frame) << '\n';
}

// ---------------------------------------------------------------------------
// Raw frames

RawFrameReader::RawFrameReader(const fs::path& path) : in_(open_in(path, true)) {
  unsigned char header[kRawHeaderSize];
  if (!in_.read(reinterpret_cast<char*>(header), kRawHeaderSize)) {
    throw Error(ErrorCode::kParseError, path.string() + ": truncated frame stream header");
  }
  if (std::memcmp(header, kRawMagic.data(), 4) != 0) {
    throw Error(ErrorCode::kParseError, path.string() + ": not a raw frame stream (bad magic)");
  }
  width_ = static_cast<int>(get_u32(header + 4));
  height_ = static_cast<int>(get_u32(header + 8));
  count_ = get_u32(header + 12);
  rate_ = std::bit_cast<double>(get_u64(header + 16));
  if (width_ <= 0 || height_ <= 0 || !(rate_ > 0.0) || !std::isfinite(rate_)) {
    throw Error(ErrorCode::kParseError, path.string() + ": invalid frame stream header");
  }
}

std::optional<color::RgbFrame> RawFrameReader::next() {
  if (read_ >= count_) return std::nullopt;
  const std::size_t n = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  std::vector<unsigned char> bytes(n * 3);
  if (!in_.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()))) {
    throw Error(ErrorCode::kParseError,
                "frame stream truncated at frame " + std::to_string(read_));
  }
  std::vector<color::Rgb8> pixels(n);
  for (std::size_t i = 0; i < n; ++i) pixels[i] = {bytes[3 * i], bytes[3 * i + 1], bytes[3 * i + 2]};
  ++read_;
  return color::RgbFrame(width_, height_, std::move(pixels));
}

RawFrameWriter::RawFrameWriter(const fs::path& path, int width, int height,
                               std::size_t frame_count, double frame_rate)
    : out_(open_out(path, true)), width_(width), height_(height), declared_(frame_count) {
  std::string header(kRawMagic.begin(), kRawMagic.end());
  put_u32(header, static_cast<std::uint32_t>(width));
  put_u32(header, static_cast<std::uint32_t>(height));
  put_u32(header, static_cast<std::uint32_t>(frame_count));
  put_u64(header, std::bit_cast<std::uint64_t>(frame_rate));
  put_u64(header, 0);
  out_.write(header.data(), static_cast<std::streamsize>(header.size()));
}

void RawFrameWriter::write(const color::RgbFrame& frame) {
  if (frame.width() != width_ || frame.height() != height_) {
    throw Error(ErrorCode::kInvalidArgument, "frame size differs from stream header");
  }
  if (written_ >= declared_) throw Error(ErrorCode::kInvalidArgument, "more frames than declared");
  std::string bytes;
  bytes.reserve(frame.pixels().size() * 3);
  for (const auto& p : frame.pixels()) {
    bytes.push_back(static_cast<char>(p.r));
    bytes.push_back(static_cast<char>(p.g));
    bytes.push_back(static_cast<char>(p.b));
  }
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  ++written_;
}

void RawFrameWriter::close() {
  if (!out_.is_open()) return;
  out_.close();
  if (written_ != declared_) {
    throw Error(ErrorCode::kInvalidArgument, "frame stream closed with " +
                                                 std::to_string(written_) + " of " +
                                                 std::to_string(declared_) + " frames");
  }
}

RawFrameWriter::~RawFrameWriter() {
  if (out_.is_open()) out_.close();
}

// ---------------------------------------------------------------------------
// PNG directories

PngDirectoryReader::PngDirectoryReader(const fs::path& dir, double frame_rate) : rate_(frame_rate) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kInputMissing, "not a directory: " + dir.string());
  std::vector<std::pair<unsigned long long, fs::path>> numbered;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.empty() || !std::all_of(stem.begin(), stem.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      continue;
    }
    numbered.emplace_back(std::stoull(stem), entry.path());
  }
  std::sort(numbered.begin(), numbered.end());
  for (auto& [n, p] : numbered) files_.push_back(std::move(p));
  if (files_.empty()) throw Error(ErrorCode::kInputMissing, "no numbered PNG frames in " + dir.string());
}

std::optional<color::RgbFrame> PngDirectoryReader::next() {
  if (read_ >= files_.size()) return std::nullopt;
  const fs::path& path = files_[read_++];
  const cv::Mat image = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (image.empty() || image.type() != CV_8UC3) {
    throw Error(ErrorCode::kParseError, "cannot decode " + path.string());
  }
  color::RgbFrame frame(image.cols, image.rows);
  for (int y = 0; y < image.rows; ++y) {
    const auto* row = image.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.cols; ++x) frame.at(x, y) = {row[x][2], row[x][1], row[x][0]};
  }
  return frame;
}

void write_png(const fs::path& path, const color::RgbFrame& frame) {
  cv::Mat image(frame.height(), frame.width(), CV_8UC3);
  for (int y = 0; y < frame.height(); ++y) {
    auto* row = image.ptr<cv::Vec3b>(y);
    for (int x = 0; x < frame.width(); ++x) {
      const auto& p = frame.at(x, y);
      row[x] = cv::Vec3b(p.b, p.g, p.r);
    }
  }
  if (!cv::imwrite(path.string(), image)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  }
}

std::unique_ptr<FrameSource> open_frames(const fs::path& path, double directory_frame_rate) {
  if (fs::is_directory(path)) return std::make_unique<PngDirectoryReader>(path, directory_frame_rate);
  if (!fs::exists(path)) throw Error(ErrorCode::kInputMissing, "frames not found: " + path.string());
  return std::make_unique<RawFrameReader>(path);
}

// ---------------------------------------------------------------------------
// Curves and signals

void write_curve_csv(const fs::path& path, const HeartRateCurve& curve) {
  auto out = open_out(path);
  out << "time_seconds,bpm\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << format_number(curve.times[i]) << ',' << format_number(curve.bpm[i]) << '\n';
  }
}

HeartRateCurve read_curve_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "time_seconds,bpm") {
    throw Error(ErrorCode::kParseError, path.string() + ": expected header 'time_seconds,bpm'");
  }
  HeartRateCurve curve;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    double t = 0, bpm = 0;
    if (fields.size() != 2 || !parse_double(fields[0], t) || !parse_double(fields[1], bpm)) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(number) +
                                              ": expected two numbers");
    }
    if (!curve.times.empty() && !(t > curve.times.back())) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(number) +
                                              ": times must be strictly increasing");
    }
    curve.times.push_back(t);
    curve.bpm.push_back(bpm);
  }
  return curve;
}

void write_signal_csv(const fs::path& path, std::span<const double> samples, double frame_rate) {
  auto out = open_out(path);
  out << "time_seconds,value\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << format_number(static_cast<double>(i) / frame_rate) << ',' << format_number(samples[i])
        << '\n';
  }
}

eval::ReferenceRecording read_reference_recording(const fs::path& path) {
  auto in = open_in(path);
  std::vector<double> times;
  eval::ReferenceRecording rec;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto fields = split_fields(content);
    double t = 0, v = 0;
    const bool numeric = fields.size() == 2 && parse_double(fields[0], t) && parse_double(fields[1], v);
    if (!numeric) {
      if (times.empty() && rec.samples.empty() && number == 1) continue;  // header
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(number) +
                                              ": expected 'time_seconds,amplitude'");
    }
    times.push_back(t);
    rec.samples.push_back(v);
  }
  if (times.size() < 2) {
    throw Error(ErrorCode::kParseError, path.string() + ": reference needs at least two samples");
  }
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw Error(ErrorCode::kParseError, path.string() + ": times must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-3 * dt + 1e-9) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ": reference timestamps are not uniformly spaced");
    }
  }
  rec.sample_rate = 1.0 / dt;
  rec.start_offset = times.front();
  return rec;
}

bool is_curve_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  return std::getline(in, line) && trim(line) == "time_seconds,bpm";
}

// ---------------------------------------------------------------------------
// Matrix dumps

void write_matrix_dump(const fs::path& path, std::array<char, 4> magic, std::size_t rows,
                       std::size_t cols, std::span<const double> values) {
  if (values.size() != rows * cols) throw Error(ErrorCode::kInvalidArgument, "matrix size mismatch");
  std::string buf(magic.begin(), magic.end());
  put_u32(buf, static_cast<std::uint32_t>(rows));
  put_u32(buf, static_cast<std::uint32_t>(cols));
  put_u32(buf, 0);
  buf.reserve(buf.size() + values.size() * 4);
  for (double v : values) put_u32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  auto out = open_out(path, true);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

MatrixDump read_matrix_dump(const fs::path& path) {
  auto in = open_in(path, true);
  unsigned char header[16];
  if (!in.read(reinterpret_cast<char*>(header), 16)) {
    throw Error(ErrorCode::kParseError, path.string() + ": truncated matrix header");
  }
  MatrixDump dump;
  std::memcpy(dump.magic.data(), header, 4);
  dump.rows = get_u32(header + 4);
  dump.cols = get_u32(header + 8);
  std::vector<unsigned char> bytes(dump.rows * dump.cols * 4);
  if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()))) {
    throw Error(ErrorCode::kParseError, path.string() + ": truncated matrix data");
  }
  dump.values.resize(dump.rows * dump.cols);
  for (std::size_t i = 0; i < dump.values.size(); ++i) {
    dump.values[i] = std::bit_cast<float>(get_u32(bytes.data() + 4 * i));
  }
  return dump;
}

void write_spectrogram_dump(const fs::path& path, const spectral::Spectrogram& spec) {
  write_matrix_dump(path, kSpectrogramMagic, spec.bins(), spec.columns(), spec.powers());
  auto out = open_out(axes_path(path));
  out << "freq_bpm";
  for (double f : spec.freq_axis()) out << ' ' << format_number(f);
  out << "\ntime_s";
  for (double t : spec.time_axis()) out << ' ' << format_number(t);
  out << '\n';
}

spectral::Spectrogram read_spectrogram_dump(const fs::path& path) {
  const MatrixDump dump = read_matrix_dump(path);
  if (dump.magic != kSpectrogramMagic) {
    throw Error(ErrorCode::kParseError, path.string() + ": not a spectrogram dump");
  }
  auto in = open_in(axes_path(path));
  std::vector<double> freqs, times;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string label;
    fields >> label;
    std::vector<double>* target = label == "freq_bpm" ? &freqs : label == "time_s" ? &times : nullptr;
    if (!target) continue;
    std::string token;
    while (fields >> token) {
      double v = 0;
      if (!parse_double(token, v)) throw Error(ErrorCode::kParseError, "bad axis value " + token);
      target->push_back(v);
    }
  }
  if (freqs.size() != dump.rows || times.size() != dump.cols) {
    throw Error(ErrorCode::kParseError, path.string() + ": axes do not match matrix size");
  }
  return spectral::Spectrogram(std::move(freqs), std::move(times),
                               std::vector<double>(dump.values.begin(), dump.values.end()));
}

// ---------------------------------------------------------------------------
// Cells

std::vector<roi::CellSpec> parse_cells(const std::string& text, const std::string& origin) {
  std::vector<roi::CellSpec> cells;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kParseError, where + ": expected 'name = i, j, k'");
    roi::CellSpec cell;
    cell.cell_id = static_cast<int>(cells.size());
    cell.name = trim(std::string_view(content).substr(0, eq));
    for (const auto& field : split_fields(content.substr(eq + 1))) {
      std::size_t index = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), index);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::kParseError, where + ": bad landmark index '" + field + "'");
      }
      cell.vertices.push_back(index);
    }
    if (cell.name.empty() || cell.vertices.size() < 3) {
      throw Error(ErrorCode::kParseError, where + ": a cell needs a name and at least 3 indices");
    }
    cells.push_back(std::move(cell));
  }
  if (cells.empty()) throw Error(ErrorCode::kParseError, origin + ": no cells defined");
  return cells;
}

std::vector<roi::CellSpec> read_cells(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_cells(text.str(), path.string());
}

std::string format_cells(std::span<const roi::CellSpec> cells) {
  std::string out;
  for (const auto& cell : cells) {
    out += cell.name + " =";
    for (std::size_t i = 0; i < cell.vertices.size(); ++i) {
      out += (i == 0 ? " " : ", ") + std::to_string(cell.vertices[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace rppg::io
