#ifndef CROWD_FRAME_HPP
#define CROWD_FRAME_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace crowd {

struct Frame {
    int index = 0;
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // row-major, width*height

    uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    uint8_t& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }

    static Frame blank(int index, int width, int height, uint8_t value = 0);
    void validate() const;  // throws data_error on broken invariants
};

enum class SeqFormat { PgmDir, RawY8, Y4m };

SeqFormat parse_seq_format(const std::string& name);

// Single-consumer pull stream of frames in ascending index order.
class FrameStream {
public:
    virtual ~FrameStream() = default;
    virtual std::optional<Frame> next() = 0;
};

// width/height are required for RawY8 and ignored otherwise.
std::unique_ptr<FrameStream> open_sequence(const std::filesystem::path& path,
                                           SeqFormat format,
                                           int width = 0, int height = 0);

std::vector<Frame> load_sequence(const std::filesystem::path& path, SeqFormat format,
                                 int width = 0, int height = 0);

Frame read_pgm(const std::filesystem::path& path, int index = 0);
void write_pgm(const Frame& frame, const std::filesystem::path& path);

// Y4M with 4:2:0 chroma; chroma is discarded on read and written as neutral gray.
class Y4mWriter {
public:
    Y4mWriter(const std::filesystem::path& path, int width, int height, int fps_num = 25,
              int fps_den = 1);
    ~Y4mWriter();
    void write(const Frame& frame);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace crowd

#endif
