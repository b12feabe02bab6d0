#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mrsr/frame.hpp"

namespace mrsr {

enum class SequenceFormat { Pgm, Png, Y4m };

SequenceFormat parse_format(const std::string& name);
std::string to_string(SequenceFormat f);

// Round half to even, then clamp to [0, 255].
std::uint8_t quantize(double v);

Frame read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Frame& frame);

// 8-bit grayscale only; other bit depths or colour types raise ParseError.
Frame read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Frame& frame);

// Luma planes of an 8-bit Y4M stream; chroma planes are skipped.
std::vector<Frame> read_y4m(const std::filesystem::path& path);
// Writes a monochrome (Cmono) stream.
void write_y4m(const std::filesystem::path& path, const std::vector<Frame>& frames);

// `spec` is either a .y4m file or a glob pattern over .pgm / .png files,
// read in lexicographic order.
std::vector<Frame> frames_read(const std::string& spec);

// PGM / PNG: one file per frame, `dir`/frame_00001.<ext> onward.
// Y4M: a single `dir`/sequence.y4m. Returns the written paths.
std::vector<std::filesystem::path> frames_write(const std::filesystem::path& dir, const std::vector<Frame>& frames,
                                                SequenceFormat format);

}  // namespace mrsr
