#include "mrsr/sequence_io.hpp"

#include <glob.h>
#include <png.h>

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "mrsr/errors.hpp"

namespace mrsr {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::string& header, const std::vector<std::uint8_t>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::uint8_t> to_bytes(const Frame& frame) {
  std::vector<std::uint8_t> bytes(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) bytes[i] = quantize(frame.data()[i]);
  return bytes;
}

Frame from_bytes(int h, int w, const std::uint8_t* bytes) {
  Frame f(h, w);
  for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = bytes[i];
  return f;
}

// PNM header tokens, skipping whitespace and comments.
class PnmHeader {
 public:
  PnmHeader(const std::vector<std::uint8_t>& bytes, const std::string& name) : bytes_(bytes), name_(name) {}

  std::string token() {
    skip();
    std::string t;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) t.push_back(static_cast<char>(bytes_[pos_++]));
    if (t.empty()) throw ParseError("corrupt PGM header in '" + name_ + "'");
    return t;
  }

  int integer() {
    const std::string t = token();
    try {
      std::size_t used = 0;
      const int v = std::stoi(t, &used);
      if (used != t.size() || v <= 0) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ParseError("corrupt PGM header in '" + name_ + "': bad field '" + t + "'");
    }
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw ParseError("corrupt PGM header in '" + name_ + "'");
    return pos_ + 1;
  }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() { png_destroy_read_struct(&png, info != nullptr ? &info : nullptr, nullptr); }
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() { png_destroy_write_struct(&png, info != nullptr ? &info : nullptr); }
};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what != nullptr) *what = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace

SequenceFormat parse_format(const std::string& name) {
  if (name == "pgm") return SequenceFormat::Pgm;
  if (name == "png") return SequenceFormat::Png;
  if (name == "y4m") return SequenceFormat::Y4m;
  throw ConfigError("unsupported format '" + name + "' (expected pgm|png|y4m)");
}

std::string to_string(SequenceFormat f) {
  switch (f) {
    case SequenceFormat::Pgm: return "pgm";
    case SequenceFormat::Png: return "png";
    case SequenceFormat::Y4m: return "y4m";
  }
  return "unknown";
}

std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 255.0) return 255;
  // nearbyint honours the current rounding mode, which is round-to-nearest-even
  // by default.
  return static_cast<std::uint8_t>(std::nearbyint(v));
}

Frame read_pgm(const fs::path& path) {
  const auto bytes = read_bytes(path);
  PnmHeader header(bytes, path.string());
  if (header.token() != "P5") throw ParseError("'" + path.string() + "' is not a binary (P5) PGM");
  const int w = header.integer();
  const int h = header.integer();
  const int maxval = header.integer();
  if (maxval > 255) throw ParseError("unsupported bit depth in '" + path.string() + "' (maxval " + std::to_string(maxval) + ")");
  const std::size_t offset = header.raster_offset();
  const std::size_t need = static_cast<std::size_t>(w) * h;
  if (bytes.size() - offset < need) throw ParseError("truncated PGM raster in '" + path.string() + "'");
  return from_bytes(h, w, bytes.data() + offset);
}

void write_pgm(const fs::path& path, const Frame& frame) {
  std::ostringstream header;
  header << "P5\n" << frame.width() << " " << frame.height() << "\n255\n";
  write_bytes(path, header.str(), to_bytes(frame));
}

Frame read_png(const fs::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open '" + path.string() + "'");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw ParseError("'" + path.string() + "' is not a PNG file");
  }
  std::string error;
  PngReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (g.png == nullptr) throw IoError("libpng initialisation failed");
  g.info = png_create_info_struct(g.png);
  if (g.info == nullptr) throw IoError("libpng initialisation failed");

  int width = 0, height = 0, depth = 0, colour = 0;
  std::vector<std::uint8_t> raster;
  std::vector<png_bytep> rows;
  // No C++ objects with non-trivial destructors are created between setjmp
  // and the calls that may longjmp.
  if (setjmp(png_jmpbuf(g.png))) throw ParseError("corrupt PNG '" + path.string() + "': " + error);
  png_init_io(g.png, file.get());
  png_set_sig_bytes(g.png, 8);
  png_read_info(g.png, g.info);
  width = static_cast<int>(png_get_image_width(g.png, g.info));
  height = static_cast<int>(png_get_image_height(g.png, g.info));
  depth = png_get_bit_depth(g.png, g.info);
  colour = png_get_color_type(g.png, g.info);
  if (depth != 8) {
    throw ParseError("unsupported bit depth " + std::to_string(depth) + " in '" + path.string() + "'");
  }
  if (colour != PNG_COLOR_TYPE_GRAY) throw ParseError("'" + path.string() + "' is not a grayscale PNG");
  raster.resize(static_cast<std::size_t>(width) * height);
  rows.resize(height);
  for (int r = 0; r < height; ++r) rows[r] = raster.data() + static_cast<std::size_t>(r) * width;
  png_read_image(g.png, rows.data());
  png_read_end(g.png, nullptr);
  return from_bytes(height, width, raster.data());
}

void write_png(const fs::path& path, const Frame& frame) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  std::vector<std::uint8_t> raster = to_bytes(frame);
  std::vector<png_bytep> rows(frame.height());
  for (int r = 0; r < frame.height(); ++r) rows[r] = raster.data() + static_cast<std::size_t>(r) * frame.width();
  std::string error;
  PngWriteGuard g;
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (g.png == nullptr) throw IoError("libpng initialisation failed");
  g.info = png_create_info_struct(g.png);
  if (g.info == nullptr) throw IoError("libpng initialisation failed");
  if (setjmp(png_jmpbuf(g.png))) throw IoError("PNG write failed for '" + path.string() + "': " + error);
  png_init_io(g.png, file.get());
  png_set_IHDR(g.png, g.info, frame.width(), frame.height(), 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(g.png, g.info);
  png_write_image(g.png, rows.data());
  png_write_end(g.png, nullptr);
}

std::vector<Frame> read_y4m(const fs::path& path) {
  const auto bytes = read_bytes(path);
  const std::string name = path.string();
  auto line_end = [&](std::size_t from) {
    const auto it = std::find(bytes.begin() + static_cast<std::ptrdiff_t>(from), bytes.end(), '\n');
    if (it == bytes.end()) throw ParseError("corrupt Y4M header in '" + name + "'");
    return static_cast<std::size_t>(it - bytes.begin());
  };
  const std::size_t header_end = line_end(0);
  std::istringstream header(std::string(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(header_end)));
  std::string magic;
  header >> magic;
  if (magic != "YUV4MPEG2") throw ParseError("'" + name + "' is not a YUV4MPEG2 stream");
  int w = 0, h = 0;
  std::string colourspace = "420";
  std::string tok;
  while (header >> tok) {
    if (tok[0] == 'W') w = std::atoi(tok.c_str() + 1);
    else if (tok[0] == 'H') h = std::atoi(tok.c_str() + 1);
    else if (tok[0] == 'C') colourspace = tok.substr(1);
  }
  if (w <= 0 || h <= 0) throw ParseError("corrupt Y4M header in '" + name + "': missing frame size");
  const std::size_t luma = static_cast<std::size_t>(w) * h;
  std::size_t chroma = 0;
  const auto half = [](int n) { return static_cast<std::size_t>((n + 1) / 2); };
  if (colourspace.rfind("mono", 0) == 0) chroma = 0;
  else if (colourspace.rfind("420", 0) == 0) chroma = 2 * half(w) * half(h);
  else if (colourspace.rfind("422", 0) == 0) chroma = 2 * half(w) * static_cast<std::size_t>(h);
  else if (colourspace.rfind("444", 0) == 0 && colourspace.find("alpha") == std::string::npos) chroma = 2 * luma;
  else throw ParseError("unsupported Y4M colourspace '" + colourspace + "' in '" + name + "'");

  std::vector<Frame> frames;
  std::size_t pos = header_end + 1;
  while (pos < bytes.size()) {
    const std::size_t end = line_end(pos);
    if (std::string(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos) + 5) != "FRAME") {
      throw ParseError("corrupt Y4M frame header in '" + name + "'");
    }
    pos = end + 1;
    if (bytes.size() - pos < luma + chroma) throw ParseError("truncated Y4M frame in '" + name + "'");
    frames.push_back(from_bytes(h, w, bytes.data() + pos));
    pos += luma + chroma;
  }
  return frames;
}

void write_y4m(const fs::path& path, const std::vector<Frame>& frames) {
  if (frames.empty()) throw InvalidArgument("write_y4m: no frames");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "YUV4MPEG2 W" << frames[0].width() << " H" << frames[0].height() << " F25:1 Ip A1:1 Cmono\n";
  for (const Frame& f : frames) {
    if (!f.same_shape(frames[0])) throw DimensionError("write_y4m: frames differ in size");
    const auto bytes = to_bytes(f);
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<Frame> frames_read(const std::string& spec) {
  if (lower_extension(spec) == ".y4m") return read_y4m(spec);
  glob_t g{};
  const int rc = glob(spec.c_str(), 0, nullptr, &g);
  std::vector<std::string> paths;
  if (rc == 0) paths.assign(g.gl_pathv, g.gl_pathv + g.gl_pathc);
  globfree(&g);
  if (paths.empty()) throw IoError("no frames match '" + spec + "'");
  std::sort(paths.begin(), paths.end());
  std::vector<Frame> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) {
    const std::string ext = lower_extension(p);
    if (ext == ".pgm") frames.push_back(read_pgm(p));
    else if (ext == ".png") frames.push_back(read_png(p));
    else throw ParseError("unsupported frame format '" + ext + "' for '" + p + "'");
  }
  return frames;
}

std::vector<fs::path> frames_write(const fs::path& dir, const std::vector<Frame>& frames, SequenceFormat format) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  std::vector<fs::path> written;
  if (format == SequenceFormat::Y4m) {
    written.push_back(dir / "sequence.y4m");
    write_y4m(written.back(), frames);
    return written;
  }
  for (std::size_t k = 0; k < frames.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05zu.%s", k + 1, format == SequenceFormat::Pgm ? "pgm" : "png");
    written.push_back(dir / name);
    if (format == SequenceFormat::Pgm) write_pgm(written.back(), frames[k]);
    else write_png(written.back(), frames[k]);
  }
  return written;
}

}  // namespace mrsr
