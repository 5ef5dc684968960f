#include "tilda/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tilda/errors.hpp"

namespace tilda {

namespace {

constexpr char kFeatureMagic[4] = {'T', 'F', 'V', '1'};
constexpr char kImageMagic[4] = {'T', 'I', 'M', '1'};
constexpr char kModelMagic[7] = {'T', 'I', 'L', 'D', 'A', '0', '1'};

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void append_f32(std::vector<std::uint8_t>& out, float v) {
    append_u32(out, std::bit_cast<std::uint32_t>(v));
}

/// Cursor over an in-memory file image; all reads are bounds-checked and
/// failures report the byte counts involved.
class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::string context)
            : bytes_(bytes), context_(std::move(context)) {}

    void require(std::size_t n) const {
        if (pos_ + n > bytes_.size()) {
            throw TruncatedFile(context_ + ": needs " +
                                std::to_string(pos_ + n) +
                                " bytes, file has only " +
                                std::to_string(bytes_.size()));
        }
    }

    void read_magic(std::span<const char> magic, const char* format_name) {
        if (bytes_.size() < magic.size() ||
            std::memcmp(bytes_.data(), magic.data(), magic.size()) != 0) {
            throw BadMagic(context_ + ": not a " + format_name + " file");
        }
        pos_ += magic.size();
    }

    std::uint32_t read_u32() {
        require(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }

    std::uint64_t read_u64() {
        require(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += 8;
        return v;
    }

    float read_f32() { return std::bit_cast<float>(read_u32()); }

    std::string read_string(std::size_t n) {
        require(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    std::span<const std::uint8_t> read_bytes(std::size_t n) {
        require(n);
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    void expect_end() const {
        if (pos_ != bytes_.size()) {
            throw CorruptPayload(context_ + ": " +
                                 std::to_string(bytes_.size() - pos_) +
                                 " unexpected trailing bytes");
        }
    }

    const std::string& context() const { return context_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::string context_;
};

// Rejects headers whose claimed payload cannot fit in the file before any
// allocation is sized from untrusted fields. The double holds products of
// u32 header fields that could overflow size_t.
void check_claimed(double claimed_bytes, std::size_t available,
                   const std::string& context) {
    if (claimed_bytes > static_cast<double>(available)) {
        throw TruncatedFile(context + ": header claims more payload than the "
                            "file holds");
    }
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open '" + path.string() + "' for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoFailure("read error on '" + path.string() + "'");
    }
    return bytes;
}

void spill(const std::filesystem::path& path,
           std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoFailure("write error on '" + path.string() + "'");
    }
}

} // namespace

std::vector<FeatureVector> read_features(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    ByteReader reader(bytes, path.string());
    reader.read_magic(kFeatureMagic, "TFV1 feature");
    const std::uint32_t count = reader.read_u32();
    const std::uint32_t dim = reader.read_u32();
    if (dim == 0 && count > 0) {
        throw CorruptPayload(path.string() + ": " + std::to_string(count) +
                             " rows of dimension 0");
    }
    check_claimed(4.0 * count * dim, bytes.size(), path.string());
    reader.require(static_cast<std::size_t>(count) * dim * 4);
    std::vector<FeatureVector> out;
    out.reserve(count);
    for (std::uint32_t r = 0; r < count; ++r) {
        FeatureVector row(dim);
        for (std::uint32_t c = 0; c < dim; ++c) {
            row[c] = reader.read_f32();
            if (!std::isfinite(row[c])) {
                throw CorruptPayload(path.string() + ": non-finite value at row " +
                                     std::to_string(r) + ", column " +
                                     std::to_string(c));
            }
        }
        out.push_back(std::move(row));
    }
    reader.expect_end();
    return out;
}

void write_features(const std::filesystem::path& path,
                    std::span<const FeatureVector> vectors) {
    const std::size_t dim = vectors.empty() ? 0 : vectors.front().size();
    std::vector<std::uint8_t> bytes;
    bytes.reserve(12 + vectors.size() * dim * 4);
    bytes.insert(bytes.end(), kFeatureMagic, kFeatureMagic + 4);
    append_u32(bytes, static_cast<std::uint32_t>(vectors.size()));
    append_u32(bytes, static_cast<std::uint32_t>(dim));
    for (const auto& row : vectors) {
        if (row.size() != dim) {
            throw DimensionMismatch("write_features: rows of length " +
                                    std::to_string(dim) + " and " +
                                    std::to_string(row.size()) + " mixed");
        }
        for (const float v : row) append_f32(bytes, v);
    }
    spill(path, bytes);
}

std::vector<std::string> read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open '" + path.string() + "' for reading");
    }
    std::vector<std::string> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            throw ParseError(path.string() + ": empty label at line " +
                             std::to_string(line_no));
        }
        labels.push_back(line);
    }
    if (in.bad()) {
        throw IoFailure("read error on '" + path.string() + "'");
    }
    return labels;
}

void write_labels(const std::filesystem::path& path,
                  std::span<const std::string> labels) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open '" + path.string() + "' for writing");
    }
    for (const auto& label : labels) {
        out << label << '\n';
    }
    if (!out) {
        throw IoFailure("write error on '" + path.string() + "'");
    }
}

std::vector<std::uint8_t> serialize_model(const AnchorStore& store) {
    const auto& cfg = store.config();
    std::vector<std::uint8_t> bytes;
    bytes.reserve(serialized_model_size(store));

    bytes.insert(bytes.end(), kModelMagic, kModelMagic + 7);
    append_u32(bytes, static_cast<std::uint32_t>(cfg.subspaces));
    append_u32(bytes, static_cast<std::uint32_t>(cfg.anchors_per_class));
    append_u32(bytes, static_cast<std::uint32_t>(cfg.dim));
    append_u64(bytes, cfg.seed);
    append_u64(bytes, store.rng_state());
    append_u32(bytes, static_cast<std::uint32_t>(store.class_count()));
    for (const auto& label : store.class_labels()) {
        append_u32(bytes, static_cast<std::uint32_t>(label.size()));
        bytes.insert(bytes.end(), label.begin(), label.end());
    }
    for (std::size_t c = 0; c < store.class_count(); ++c) {
        for (const double v : store.class_anchor_block(c)) {
            append_f32(bytes, static_cast<float>(v));
        }
    }
    for (std::size_t c = 0; c < store.class_count(); ++c) {
        for (const std::uint64_t n : store.class_counter_block(c)) {
            append_u64(bytes, n);
        }
    }
    return bytes;
}

std::size_t serialized_model_size(const AnchorStore& store) {
    const auto& cfg = store.config();
    const std::size_t slots =
        store.class_count() * cfg.subspaces * cfg.anchors_per_class;
    std::size_t bytes = 7 + 3 * 4 + 2 * 8 + 4; // header through class count
    for (const auto& label : store.class_labels()) {
        bytes += 4 + label.size();
    }
    return bytes + slots * store.subvector_dim() * 4 + slots * 8;
}

AnchorStore deserialize_model(std::span<const std::uint8_t> bytes) {
    ByteReader reader(bytes, "model");
    // Distinguish a wrong file from a future model revision.
    if (bytes.size() >= 7 && std::memcmp(bytes.data(), kModelMagic, 5) == 0 &&
        std::memcmp(bytes.data(), kModelMagic, 7) != 0) {
        throw VersionMismatch("model: unsupported TILDA format revision '" +
                              std::string(reinterpret_cast<const char*>(
                                              bytes.data() + 5),
                                          2) +
                              "'");
    }
    reader.read_magic(kModelMagic, "TILDA01 model");

    ModelConfig cfg;
    cfg.subspaces = reader.read_u32();
    cfg.anchors_per_class = reader.read_u32();
    cfg.dim = reader.read_u32();
    cfg.seed = reader.read_u64();
    const std::uint64_t rng_state = reader.read_u64();
    const std::uint32_t n_classes = reader.read_u32();
    try {
        cfg.validate();
    } catch (const InvalidConfig& e) {
        throw CorruptPayload("model: " + std::string(e.what()));
    }

    std::vector<std::string> labels;
    labels.reserve(n_classes);
    for (std::uint32_t c = 0; c < n_classes; ++c) {
        const std::uint32_t len = reader.read_u32();
        labels.push_back(reader.read_string(len));
        if (labels.back().empty()) {
            throw CorruptPayload("model: empty class label");
        }
    }

    const std::size_t sub_dim = cfg.dim / cfg.subspaces;
    check_claimed(static_cast<double>(n_classes) *
                      static_cast<double>(cfg.subspaces) *
                      static_cast<double>(cfg.anchors_per_class) *
                      (4.0 * static_cast<double>(sub_dim) + 8.0),
                  bytes.size(), "model");
    const std::size_t slots = static_cast<std::size_t>(n_classes) *
                              cfg.subspaces * cfg.anchors_per_class;
    std::vector<float> anchors(slots * sub_dim);
    for (auto& v : anchors) v = reader.read_f32();
    std::vector<std::uint64_t> counters(slots);
    for (auto& n : counters) n = reader.read_u64();
    reader.expect_end();

    return AnchorStore::restore(cfg, std::move(labels), anchors, counters,
                                rng_state);
}

void save_model(const std::filesystem::path& path, const AnchorStore& store) {
    spill(path, serialize_model(store));
}

AnchorStore load_model(const std::filesystem::path& path) {
    return deserialize_model(slurp(path));
}

std::vector<ImageTensor> read_images(const std::filesystem::path& path) {
    const auto bytes = slurp(path);
    ByteReader reader(bytes, path.string());
    reader.read_magic(kImageMagic, "TIM1 image container");
    const std::uint32_t count = reader.read_u32();
    const std::uint32_t height = reader.read_u32();
    const std::uint32_t width = reader.read_u32();
    const std::uint32_t channels = reader.read_u32();
    if (channels < 1 || channels > 4) {
        throw CorruptPayload(path.string() + ": channel count " +
                             std::to_string(channels) + " outside 1..4");
    }
    if (height < 1 || width < 1) {
        throw CorruptPayload(path.string() + ": degenerate image dimensions " +
                             std::to_string(height) + "x" +
                             std::to_string(width));
    }
    check_claimed(static_cast<double>(count) * height * width * channels,
                  bytes.size(), path.string());

    const std::size_t pixel_bytes =
        static_cast<std::size_t>(height) * width * channels;
    std::vector<ImageTensor> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto payload = reader.read_bytes(pixel_bytes);
        out.push_back(ImageTensor{height, width, channels,
                                  {payload.begin(), payload.end()}});
    }
    reader.expect_end();
    return out;
}

void write_images(const std::filesystem::path& path,
                  std::span<const ImageTensor> images) {
    if (images.empty()) {
        throw DimensionMismatch("write_images: empty container");
    }
    const auto& first = images.front();
    check_image(first);

    std::vector<std::uint8_t> bytes;
    bytes.reserve(20 + images.size() * first.data.size());
    bytes.insert(bytes.end(), kImageMagic, kImageMagic + 4);
    append_u32(bytes, static_cast<std::uint32_t>(images.size()));
    append_u32(bytes, static_cast<std::uint32_t>(first.height));
    append_u32(bytes, static_cast<std::uint32_t>(first.width));
    append_u32(bytes, static_cast<std::uint32_t>(first.channels));
    for (const auto& img : images) {
        if (img.height != first.height || img.width != first.width ||
            img.channels != first.channels) {
            throw DimensionMismatch(
                "write_images: container requires uniform dimensions");
        }
        check_image(img);
        bytes.insert(bytes.end(), img.data.begin(), img.data.end());
    }
    spill(path, bytes);
}

std::vector<std::pair<FeatureVector, std::string>> read_csv_features(
    const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open '" + path.string() + "' for reading");
    }

    std::vector<std::pair<FeatureVector, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && has_header) continue;
        if (line.empty()) continue;

        std::vector<std::string> cells;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();

        if (cells.size() < 2) {
            throw ParseError(path.string() + ": line " +
                             std::to_string(line_no) +
                             " needs at least one feature and a label");
        }
        if (dim == 0) {
            dim = cells.size() - 1;
        } else if (cells.size() - 1 != dim) {
            throw ParseError(path.string() + ": line " +
                             std::to_string(line_no) + " has " +
                             std::to_string(cells.size() - 1) +
                             " feature columns, expected " +
                             std::to_string(dim));
        }

        FeatureVector row_values(dim);
        for (std::size_t c = 0; c < dim; ++c) {
            const std::string& text = cells[c];
            const char* begin = text.data();
            const char* end = begin + text.size();
            while (begin < end && *begin == ' ') ++begin;
            while (end > begin && *(end - 1) == ' ') --end;
            float value = 0.0F;
            const auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc() || ptr != end || begin == end) {
                throw ParseError(path.string() + ": line " +
                                 std::to_string(line_no) + ", column " +
                                 std::to_string(c + 1) +
                                 ": cell '" + text + "' is not numeric");
            }
            row_values[c] = value;
        }
        std::string label = cells.back();
        while (!label.empty() && label.front() == ' ') label.erase(0, 1);
        while (!label.empty() && label.back() == ' ') label.pop_back();
        if (label.empty()) {
            throw ParseError(path.string() + ": line " +
                             std::to_string(line_no) + " has an empty label");
        }
        out.emplace_back(std::move(row_values), std::move(label));
    }
    if (in.bad()) {
        throw IoFailure("read error on '" + path.string() + "'");
    }
    return out;
}

} // namespace tilda
