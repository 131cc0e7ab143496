#include "uosr/tensorio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace uosr {

namespace {

constexpr unsigned char kMagic[4] = {0x55, 0x4f, 0x53, 0x52};  // "UOSR"
constexpr unsigned char kVersion = 0x01;
constexpr unsigned char kDtypeReal32 = 0x01;
constexpr unsigned char kDtypeInt64 = 0x02;

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

std::uint32_t float_bits(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    return u;
}

float bits_float(std::uint32_t u) {
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_failure, "cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) raise(errc::io_failure, "read failed for " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_failure, "cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) raise(errc::io_failure, "write failed for " + path.string());
}

struct Header {
    unsigned char dtype = 0;
    std::vector<std::uint64_t> dims;
    std::size_t payload_offset = 0;
};

Header parse_header(const std::vector<unsigned char>& bytes,
                    const std::filesystem::path& path) {
    if (bytes.size() < 7) raise(errc::malformed_header, "file too short: " + path.string());
    if (!std::equal(kMagic, kMagic + 4, bytes.data()))
        raise(errc::malformed_header, "bad magic in " + path.string());
    if (bytes[4] != kVersion)
        raise(errc::malformed_header, "unsupported version in " + path.string());
    Header h;
    h.dtype = bytes[5];
    if (h.dtype != kDtypeReal32 && h.dtype != kDtypeInt64)
        raise(errc::malformed_header, "unknown dtype code in " + path.string());
    unsigned rank = bytes[6];
    if (bytes.size() < 7 + 8 * static_cast<std::size_t>(rank))
        raise(errc::malformed_header, "truncated dims in " + path.string());
    for (unsigned i = 0; i < rank; ++i)
        h.dims.push_back(get_u64_le(bytes.data() + 7 + 8 * i));
    h.payload_offset = 7 + 8 * static_cast<std::size_t>(rank);
    return h;
}

// Split one CSV line, trimming surrounding whitespace per field.
std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        std::string_view field = line.substr(start, comma == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
            field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                                  field.back() == '\r'))
            field.remove_suffix(1);
        fields.push_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_failure, "cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    if (in.bad()) raise(errc::io_failure, "read failed for " + path.string());
    // A trailing blank line is tolerated.
    while (!lines.empty() && lines.back().find_first_not_of(" \t\r") == std::string::npos)
        lines.pop_back();
    return lines;
}

double parse_real(std::string_view field, std::size_t line_no,
                  const std::filesystem::path& path) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        raise(errc::malformed_header, "unparseable value '" + std::string(field) + "' at line " +
                                          std::to_string(line_no) + " of " + path.string());
    return v;
}

std::int64_t parse_int(std::string_view field, std::size_t line_no,
                       const std::filesystem::path& path) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        raise(errc::malformed_header, "non-integer label '" + std::string(field) + "' at line " +
                                          std::to_string(line_no) + " of " + path.string());
    return v;
}

void check_finite(const FeatureMatrix& m, const std::filesystem::path& path) {
    for (double v : m.data)
        if (!std::isfinite(v))
            raise(errc::non_finite_value, "non-finite value in " + path.string());
}

}  // namespace

FeatureMatrix vstack(const FeatureMatrix& a, const FeatureMatrix& b) {
    if (a.cols != b.cols)
        raise(errc::dim_mismatch, "vstack: " + std::to_string(a.cols) + " vs " +
                                      std::to_string(b.cols) + " columns");
    FeatureMatrix out;
    out.rows = a.rows + b.rows;
    out.cols = a.cols;
    out.data.reserve(out.rows * out.cols);
    out.data.insert(out.data.end(), a.data.begin(), a.data.end());
    out.data.insert(out.data.end(), b.data.begin(), b.data.end());
    return out;
}

FeatureMatrix load_matrix(const std::filesystem::path& path, FileFormat format) {
    FeatureMatrix m;
    if (format == FileFormat::binary) {
        auto bytes = read_file(path);
        Header h = parse_header(bytes, path);
        if (h.dtype != kDtypeReal32)
            raise(errc::malformed_header, "expected real32 dtype in " + path.string());
        if (h.dims.size() != 2)
            raise(errc::malformed_header, "expected rank 2 in " + path.string());
        m.rows = h.dims[0];
        m.cols = h.dims[1];
        if (m.rows < 1 || m.cols < 1)
            raise(errc::shape_mismatch, "empty dims in " + path.string());
        std::size_t expected = h.payload_offset + 4 * m.rows * m.cols;
        if (bytes.size() != expected)
            raise(errc::shape_mismatch, "payload length mismatch in " + path.string() + " (" +
                                            std::to_string(bytes.size() - h.payload_offset) +
                                            " bytes, expected " +
                                            std::to_string(4 * m.rows * m.cols) + ")");
        m.data.resize(m.rows * m.cols);
        const unsigned char* p = bytes.data() + h.payload_offset;
        for (std::size_t i = 0; i < m.data.size(); ++i, p += 4) {
            std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                              static_cast<std::uint32_t>(p[1]) << 8 |
                              static_cast<std::uint32_t>(p[2]) << 16 |
                              static_cast<std::uint32_t>(p[3]) << 24;
            m.data[i] = static_cast<double>(bits_float(u));
        }
    } else {
        auto lines = read_lines(path);
        if (lines.empty()) raise(errc::shape_mismatch, "empty csv " + path.string());
        for (std::size_t i = 0; i < lines.size(); ++i) {
            auto fields = split_fields(lines[i]);
            if (i == 0) {
                m.cols = fields.size();
            } else if (fields.size() != m.cols) {
                raise(errc::shape_mismatch, "line " + std::to_string(i + 1) + " of " +
                                                path.string() + " has " +
                                                std::to_string(fields.size()) +
                                                " fields, expected " + std::to_string(m.cols));
            }
            for (auto f : fields) m.data.push_back(parse_real(f, i + 1, path));
        }
        m.rows = lines.size();
    }
    check_finite(m, path);
    return m;
}

void write_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
    std::string bytes;
    bytes.reserve(7 + 16 + 4 * m.data.size());
    bytes.append(reinterpret_cast<const char*>(kMagic), 4);
    bytes.push_back(static_cast<char>(kVersion));
    bytes.push_back(static_cast<char>(kDtypeReal32));
    bytes.push_back(static_cast<char>(2));  // rank
    put_u64_le(bytes, m.rows);
    put_u64_le(bytes, m.cols);
    for (double v : m.data) {
        float f = static_cast<float>(v);
        if (!std::isfinite(f))
            raise(errc::non_finite_value,
                  "value " + std::to_string(v) + " not storable at 32-bit precision");
        std::uint32_t u = float_bits(f);
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
    }
    write_file(path, bytes);
}

LabelVector load_labels(const std::filesystem::path& path, FileFormat format) {
    LabelVector labels;
    if (format == FileFormat::binary) {
        auto bytes = read_file(path);
        Header h = parse_header(bytes, path);
        if (h.dtype != kDtypeInt64)
            raise(errc::malformed_header, "expected int64 dtype in " + path.string());
        if (h.dims.size() != 1)
            raise(errc::malformed_header, "expected rank 1 in " + path.string());
        std::size_t n = h.dims[0];
        if (bytes.size() != h.payload_offset + 8 * n)
            raise(errc::shape_mismatch, "payload length mismatch in " + path.string());
        labels.resize(n);
        const unsigned char* p = bytes.data() + h.payload_offset;
        for (std::size_t i = 0; i < n; ++i, p += 8)
            labels[i] = static_cast<std::int64_t>(get_u64_le(p));
    } else {
        auto lines = read_lines(path);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            auto fields = split_fields(lines[i]);
            if (fields.size() != 1)
                raise(errc::shape_mismatch, "line " + std::to_string(i + 1) + " of " +
                                                path.string() + " has " +
                                                std::to_string(fields.size()) +
                                                " fields, expected 1");
            labels.push_back(parse_int(fields[0], i + 1, path));
        }
    }
    return labels;
}

void write_labels(const LabelVector& labels, const std::filesystem::path& path) {
    std::string bytes;
    bytes.reserve(7 + 8 + 8 * labels.size());
    bytes.append(reinterpret_cast<const char*>(kMagic), 4);
    bytes.push_back(static_cast<char>(kVersion));
    bytes.push_back(static_cast<char>(kDtypeInt64));
    bytes.push_back(static_cast<char>(1));  // rank
    put_u64_le(bytes, labels.size());
    for (std::int64_t v : labels) put_u64_le(bytes, static_cast<std::uint64_t>(v));
    write_file(path, bytes);
}

void validate_bundle(const EvaluationBundle& b, std::size_t n_classes) {
    auto check_rows = [](std::size_t got, std::size_t want, const char* what) {
        if (got != want)
            raise(errc::row_count_mismatch, std::string(what) + ": " + std::to_string(got) +
                                                " rows vs " + std::to_string(want));
    };
    check_rows(b.test_labels.size(), b.test_features.rows, "test labels");
    if (b.test_logits) check_rows(b.test_logits->rows, b.test_features.rows, "test logits");
    if (b.train_features && b.train_labels)
        check_rows(b.train_labels->size(), b.train_features->rows, "train labels");
    if (b.ood_logits) check_rows(b.ood_logits->rows, b.ood_features.rows, "ood logits");
    if (b.ood_class_ids) check_rows(b.ood_class_ids->size(), b.ood_features.rows, "ood class ids");

    auto check_dim = [&](const FeatureMatrix& m, const char* what) {
        if (m.cols != b.test_features.cols)
            raise(errc::dim_mismatch, std::string(what) + ": " + std::to_string(m.cols) +
                                          " cols vs test " +
                                          std::to_string(b.test_features.cols));
    };
    if (b.train_features) check_dim(*b.train_features, "train features");
    check_dim(b.ood_features, "ood features");

    if (b.test_logits && b.test_logits->cols != n_classes)
        raise(errc::dim_mismatch, "test logits have " + std::to_string(b.test_logits->cols) +
                                      " classes, expected " + std::to_string(n_classes));
    if (b.ood_logits && b.ood_logits->cols != n_classes)
        raise(errc::dim_mismatch, "ood logits have " + std::to_string(b.ood_logits->cols) +
                                      " classes, expected " + std::to_string(n_classes));

    auto check_labels = [&](const LabelVector& labels, const char* what) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] < 0 || labels[i] >= static_cast<std::int64_t>(n_classes))
                raise(errc::label_out_of_range, std::string(what) + "[" + std::to_string(i) +
                                                    "] = " + std::to_string(labels[i]) +
                                                    " outside [0, " +
                                                    std::to_string(n_classes) + ")");
    };
    check_labels(b.test_labels, "test labels");
    if (b.train_labels) check_labels(*b.train_labels, "train labels");
}

}  // namespace uosr
