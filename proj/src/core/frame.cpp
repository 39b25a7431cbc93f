#include "core/frame.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace crowd {

Frame Frame::blank(int index, int width, int height, uint8_t value) {
    Frame f;
    f.index = index;
    f.width = width;
    f.height = height;
    f.pixels.assign(static_cast<size_t>(width) * height, value);
    return f;
}

void Frame::validate() const {
    if (index < 0) throw data_error("frame index must be non-negative");
    if (width < 16 || height < 16)
        throw data_error("frame " + std::to_string(index) + ": dimensions must be >= 16");
    if (pixels.size() != static_cast<size_t>(width) * height)
        throw data_error("frame " + std::to_string(index) + ": pixel count mismatch");
}

SeqFormat parse_seq_format(const std::string& name) {
    if (name == "pgm_dir") return SeqFormat::PgmDir;
    if (name == "raw_y8") return SeqFormat::RawY8;
    if (name == "y4m") return SeqFormat::Y4m;
    throw usage_error("unknown sequence format: " + name);
}

namespace {

// Skips PGM whitespace and '#' comments, returns next token.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
                tok.push_back(static_cast<char>(in.get()));
            return tok;
        }
    }
    throw data_error("unexpected end of PGM header");
}

class PgmDirStream : public FrameStream {
public:
    explicit PgmDirStream(const fs::path& dir) {
        if (!fs::is_directory(dir)) throw data_error("not a directory: " + dir.string());
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_regular_file() && e.path().extension() == ".pgm")
                files_.push_back(e.path());
        }
        std::sort(files_.begin(), files_.end());
        if (files_.empty()) throw data_error("no frames found in " + dir.string());
    }

    std::optional<Frame> next() override {
        if (pos_ >= files_.size()) return std::nullopt;
        Frame f = read_pgm(files_[pos_], static_cast<int>(pos_));
        ++pos_;
        if (width_ == 0) {
            width_ = f.width;
            height_ = f.height;
        } else if (f.width != width_ || f.height != height_) {
            throw data_error("frame " + std::to_string(f.index) + ": dimension mismatch mid-stream");
        }
        return f;
    }

private:
    std::vector<fs::path> files_;
    size_t pos_ = 0;
    int width_ = 0, height_ = 0;
};

class RawY8Stream : public FrameStream {
public:
    RawY8Stream(const fs::path& path, int width, int height)
        : in_(path, std::ios::binary), width_(width), height_(height) {
        if (width < 16 || height < 16)
            throw usage_error("raw_y8 requires width and height >= 16");
        if (!in_) throw data_error("cannot open " + path.string());
    }

    std::optional<Frame> next() override {
        Frame f = Frame::blank(index_, width_, height_);
        in_.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
        if (in_.gcount() == 0) return std::nullopt;
        if (in_.gcount() != static_cast<std::streamsize>(f.pixels.size()))
            throw data_error("frame " + std::to_string(index_) + ": truncated raw_y8 frame");
        ++index_;
        return f;
    }

private:
    std::ifstream in_;
    int width_, height_;
    int index_ = 0;
};

class Y4mStream : public FrameStream {
public:
    explicit Y4mStream(const fs::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw data_error("cannot open " + path.string());
        std::string header;
        std::getline(in_, header);
        std::istringstream hs(header);
        std::string magic;
        hs >> magic;
        if (magic != "YUV4MPEG2") throw data_error("corrupt Y4M header in " + path.string());
        std::string tok;
        while (hs >> tok) {
            if (tok.size() < 2) continue;
            if (tok[0] == 'W') width_ = std::stoi(tok.substr(1));
            if (tok[0] == 'H') height_ = std::stoi(tok.substr(1));
            if (tok[0] == 'C' && tok.substr(1, 3) != "420")
                throw data_error("unsupported Y4M chroma mode " + tok);
        }
        if (width_ < 16 || height_ < 16)
            throw data_error("Y4M header missing or bad dimensions");
    }

    std::optional<Frame> next() override {
        std::string line;
        if (!std::getline(in_, line)) return std::nullopt;
        if (line.rfind("FRAME", 0) != 0)
            throw data_error("frame " + std::to_string(index_) + ": corrupt Y4M frame marker");
        Frame f = Frame::blank(index_, width_, height_);
        in_.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
        if (in_.gcount() != static_cast<std::streamsize>(f.pixels.size()))
            throw data_error("frame " + std::to_string(index_) + ": truncated Y4M luma plane");
        // discard chroma (4:2:0 -> half-size U and V planes)
        in_.ignore(static_cast<std::streamsize>(f.pixels.size()) / 2);
        ++index_;
        return f;
    }

private:
    std::ifstream in_;
    int width_ = 0, height_ = 0;
    int index_ = 0;
};

}  // namespace

std::unique_ptr<FrameStream> open_sequence(const fs::path& path, SeqFormat format, int width,
                                           int height) {
    if (!fs::exists(path)) throw data_error("path does not exist: " + path.string());
    switch (format) {
        case SeqFormat::PgmDir:
            return std::make_unique<PgmDirStream>(path);
        case SeqFormat::RawY8:
            return std::make_unique<RawY8Stream>(path, width, height);
        case SeqFormat::Y4m:
            return std::make_unique<Y4mStream>(path);
    }
    throw usage_error("bad sequence format");
}

std::vector<Frame> load_sequence(const fs::path& path, SeqFormat format, int width, int height) {
    auto stream = open_sequence(path, format, width, height);
    std::vector<Frame> frames;
    while (auto f = stream->next()) frames.push_back(std::move(*f));
    if (frames.empty()) throw data_error("no frames found in " + path.string());
    return frames;
}

Frame read_pgm(const fs::path& path, int index) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path.string());
    if (pnm_token(in) != "P5")
        throw data_error("frame " + std::to_string(index) + ": not a binary PGM: " + path.string());
    int width = std::stoi(pnm_token(in));
    int height = std::stoi(pnm_token(in));
    int maxval = std::stoi(pnm_token(in));
    if (maxval != 255)
        throw data_error("frame " + std::to_string(index) + ": PGM maxval must be 255");
    int sep = in.get();  // exactly one whitespace byte separates header and payload
    if (sep == EOF || !std::isspace(sep))
        throw data_error("frame " + std::to_string(index) + ": malformed PGM header");
    Frame f = Frame::blank(index, width, height);
    in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.pixels.size()))
        throw data_error("frame " + std::to_string(index) + ": truncated PGM payload");
    f.validate();
    return f;
}

void write_pgm(const Frame& frame, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
}

struct Y4mWriter::Impl {
    std::ofstream out;
    int width, height;
    std::vector<uint8_t> chroma;
};

Y4mWriter::Y4mWriter(const fs::path& path, int width, int height, int fps_num, int fps_den)
    : impl_(std::make_unique<Impl>()) {
    impl_->out.open(path, std::ios::binary);
    if (!impl_->out) throw data_error("cannot write " + path.string());
    impl_->width = width;
    impl_->height = height;
    impl_->chroma.assign(static_cast<size_t>(width) * height / 4, 128);
    impl_->out << "YUV4MPEG2 W" << width << " H" << height << " F" << fps_num << ":" << fps_den
               << " Ip A1:1 C420\n";
}

Y4mWriter::~Y4mWriter() = default;

void Y4mWriter::write(const Frame& frame) {
    if (frame.width != impl_->width || frame.height != impl_->height)
        throw data_error("frame " + std::to_string(frame.index) + ": dimension mismatch in Y4M writer");
    impl_->out << "FRAME\n";
    impl_->out.write(reinterpret_cast<const char*>(frame.pixels.data()),
                     static_cast<std::streamsize>(frame.pixels.size()));
    // neutral chroma planes
    impl_->out.write(reinterpret_cast<const char*>(impl_->chroma.data()),
                     static_cast<std::streamsize>(impl_->chroma.size()));
    impl_->out.write(reinterpret_cast<const char*>(impl_->chroma.data()),
                     static_cast<std::streamsize>(impl_->chroma.size()));
}

}  // namespace crowd
