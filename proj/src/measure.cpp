#include "semidot/measure.hpp"

#include "semidot/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

namespace semidot {

namespace {

constexpr double kMassTolerance = 1e-9;

class PgmReader {
public:
    explicit PgmReader(std::string_view bytes) : bytes_(bytes) {}

    std::size_t offset() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ >= bytes_.size(); }

    // Skips whitespace and '#' comments (which run to end of line).
    void skip_separators()
    {
        while (pos_ < bytes_.size()) {
            auto const c = static_cast<unsigned char>(bytes_[pos_]);
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r')
                    ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    // Reads an unsigned decimal integer. Returns false when no digit is present.
    bool read_uint(unsigned long& out)
    {
        std::size_t const start = pos_;
        unsigned long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            value = value * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
            if (value > 0xFFFFFFFFul)
                throw Error(ErrorCode::MalformedHeader,
                            "integer overflow at byte offset " + std::to_string(start));
            ++pos_;
        }
        out = value;
        return pos_ > start;
    }

    unsigned char byte_at(std::size_t i) const { return static_cast<unsigned char>(bytes_[i]); }
    std::size_t size() const noexcept { return bytes_.size(); }
    void advance(std::size_t n) noexcept { pos_ += n; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

unsigned long read_header_field(PgmReader& r, const char* name)
{
    r.skip_separators();
    std::size_t const at = r.offset();
    unsigned long v = 0;
    if (r.at_end() || !r.read_uint(v))
        throw Error(ErrorCode::MalformedHeader,
                    std::string("expected ") + name + " at byte offset " + std::to_string(at));
    if (!r.at_end() && !std::isspace(r.byte_at(r.offset())) && r.byte_at(r.offset()) != '#')
        throw Error(ErrorCode::MalformedHeader,
                    std::string("unexpected byte after ") + name + " at byte offset "
                        + std::to_string(r.offset()));
    return v;
}

} // namespace

void validate(const GridDensity& density)
{
    if (density.cols <= 0 || density.rows <= 0)
        throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
    if (!(density.cell_side > 0.0) || !std::isfinite(density.cell_side))
        throw Error(ErrorCode::InvalidArgument, "cell side must be positive");
    if (density.cell_mass.size()
        != static_cast<std::size_t>(density.cols) * static_cast<std::size_t>(density.rows))
        throw Error(ErrorCode::InvalidArgument, "cell mass count does not match grid size");
    double total = 0.0;
    for (double m : density.cell_mass) {
        if (!(m >= 0.0) || !std::isfinite(m))
            throw Error(ErrorCode::InvalidArgument, "cell masses must be finite and non-negative");
        total += m;
    }
    if (std::abs(total - 1.0) > kMassTolerance)
        throw Error(ErrorCode::InvalidArgument, "cell masses must sum to 1");
}

void validate(const DiscreteMeasure& nu, bool require_distinct)
{
    if (nu.sites.empty())
        throw Error(ErrorCode::InvalidArgument, "discrete measure needs at least one site");
    if (nu.sites.size() != nu.masses.size())
        throw Error(ErrorCode::InvalidArgument, "site and mass counts differ");
    double total = 0.0;
    for (double m : nu.masses) {
        if (!(m > 0.0) || !std::isfinite(m))
            throw Error(ErrorCode::InvalidArgument, "site masses must be positive");
        total += m;
    }
    if (std::abs(total - 1.0) > kMassTolerance)
        throw Error(ErrorCode::InvalidArgument, "site masses must sum to 1");
    for (auto const& s : nu.sites)
        if (!std::isfinite(s.x) || !std::isfinite(s.y))
            throw Error(ErrorCode::InvalidArgument, "site coordinates must be finite");
    if (require_distinct) {
        std::vector<Point> sorted = nu.sites;
        std::sort(sorted.begin(), sorted.end(),
                  [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw Error(ErrorCode::InvalidArgument, "sites must be pairwise distinct");
    }
}

RawImage load_pgm(std::string_view bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw Error(ErrorCode::UnsupportedMagic, "not a PGM file at byte offset 0");
    bool const binary = bytes[1] == '5';
    if (bytes[1] != '2' && bytes[1] != '5')
        throw Error(ErrorCode::UnsupportedMagic,
                    std::string("magic 'P") + bytes[1] + "' at byte offset 0 is not P2 or P5");

    PgmReader r(bytes);
    r.advance(2);
    if (!r.at_end() && !std::isspace(r.byte_at(r.offset())) && r.byte_at(r.offset()) != '#')
        throw Error(ErrorCode::UnsupportedMagic, "malformed magic at byte offset 0");

    auto const width = read_header_field(r, "width");
    auto const height = read_header_field(r, "height");
    auto const maxval = read_header_field(r, "maxval");
    if (width == 0 || height == 0)
        throw Error(ErrorCode::MalformedHeader, "zero image dimension");
    if (maxval == 0 || maxval > 65535)
        throw Error(ErrorCode::MalformedHeader,
                    "maxval " + std::to_string(maxval) + " outside [1, 65535]");
    if (width * height > (1ul << 28))
        throw Error(ErrorCode::MalformedHeader, "image dimensions too large");

    RawImage img;
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    img.maxval = static_cast<int>(maxval);
    std::size_t const count = width * height;
    img.values.resize(count);

    if (binary) {
        // Exactly one whitespace byte separates maxval from the raster.
        if (r.at_end())
            throw Error(ErrorCode::TruncatedData,
                        "missing raster at byte offset " + std::to_string(r.offset()));
        r.advance(1);
        std::size_t const bytes_per_sample = maxval < 256 ? 1 : 2;
        std::size_t const start = r.offset();
        if (r.size() - start < count * bytes_per_sample)
            throw Error(ErrorCode::TruncatedData,
                        "raster needs " + std::to_string(count * bytes_per_sample)
                            + " bytes from byte offset " + std::to_string(start) + ", file ends at "
                            + std::to_string(r.size()));
        for (std::size_t k = 0; k < count; ++k) {
            unsigned long v = 0;
            if (bytes_per_sample == 1) {
                v = r.byte_at(start + k);
            } else {
                v = (static_cast<unsigned long>(r.byte_at(start + 2 * k)) << 8)
                    | r.byte_at(start + 2 * k + 1);
            }
            if (v > maxval)
                throw Error(ErrorCode::MalformedHeader,
                            "sample exceeds maxval at byte offset "
                                + std::to_string(start + k * bytes_per_sample));
            img.values[k] = static_cast<double>(v);
        }
    } else {
        for (std::size_t k = 0; k < count; ++k) {
            r.skip_separators();
            std::size_t const at = r.offset();
            if (r.at_end())
                throw Error(ErrorCode::TruncatedData,
                            "expected " + std::to_string(count) + " samples, got "
                                + std::to_string(k) + " before byte offset " + std::to_string(at));
            unsigned long v = 0;
            if (!r.read_uint(v))
                throw Error(ErrorCode::MalformedHeader,
                            "non-numeric sample at byte offset " + std::to_string(at));
            if (v > maxval)
                throw Error(ErrorCode::MalformedHeader,
                            "sample exceeds maxval at byte offset " + std::to_string(at));
            img.values[k] = static_cast<double>(v);
        }
    }
    return img;
}

RawImage load_pgm_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw Error(ErrorCode::Io, "read failed for '" + path.string() + "'");
    try {
        return load_pgm(bytes);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

namespace {

double checked_total(const RawImage& img)
{
    if (img.width <= 0 || img.height <= 0
        || img.values.size()
               != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
        throw Error(ErrorCode::InvalidArgument, "image values do not match its dimensions");
    double total = 0.0;
    for (double v : img.values) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "image values must be non-negative");
        total += v;
    }
    if (!(total > 0.0))
        throw Error(ErrorCode::ZeroMassImage, "image has no positive pixel");
    return total;
}

// File row r (top first) lands in world row rows-1-r.
std::size_t world_index(const RawImage& img, int col, int world_row)
{
    int const file_row = img.height - 1 - world_row;
    return static_cast<std::size_t>(file_row) * static_cast<std::size_t>(img.width)
           + static_cast<std::size_t>(col);
}

} // namespace

GridDensity image_to_density(const RawImage& img)
{
    double const total = checked_total(img);
    GridDensity d;
    d.cols = img.width;
    d.rows = img.height;
    d.cell_side = 1.0 / static_cast<double>(std::max(img.width, img.height));
    d.cell_mass.resize(img.values.size());
    for (int row = 0; row < d.rows; ++row)
        for (int col = 0; col < d.cols; ++col)
            d.cell_mass[d.index(col, row)] = img.values[world_index(img, col, row)] / total;
    return d;
}

DiscreteMeasure image_to_discrete(const RawImage& img)
{
    double const total = checked_total(img);
    double const side = 1.0 / static_cast<double>(std::max(img.width, img.height));
    DiscreteMeasure nu;
    for (int row = 0; row < img.height; ++row) {
        for (int col = 0; col < img.width; ++col) {
            double const v = img.values[world_index(img, col, row)];
            if (v <= 0.0)
                continue;
            nu.sites.push_back({(col + 0.5) * side, (row + 0.5) * side});
            nu.masses.push_back(v / total);
        }
    }
    return nu;
}

GridDensity uniform_density(int cols, int rows)
{
    if (cols <= 0 || rows <= 0)
        throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
    GridDensity d;
    d.cols = cols;
    d.rows = rows;
    d.cell_side = 1.0 / static_cast<double>(std::max(cols, rows));
    d.cell_mass.assign(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows),
                       1.0 / (static_cast<double>(cols) * static_cast<double>(rows)));
    return d;
}

GridDensity coarsen(const GridDensity& density, int divisor)
{
    if (divisor < 1)
        throw Error(ErrorCode::InvalidArgument, "grid divisor must be >= 1");
    if (divisor == 1)
        return density;
    GridDensity out;
    out.cols = (density.cols + divisor - 1) / divisor;
    out.rows = (density.rows + divisor - 1) / divisor;
    out.cell_side = density.cell_side * divisor;
    out.origin = density.origin;
    out.cell_mass.assign(static_cast<std::size_t>(out.cols) * static_cast<std::size_t>(out.rows), 0.0);
    for (int row = 0; row < density.rows; ++row)
        for (int col = 0; col < density.cols; ++col)
            out.cell_mass[out.index(col / divisor, row / divisor)] +=
                density.cell_mass[density.index(col, row)];
    return out;
}

GridDensity refine(const GridDensity& density, int factor)
{
    if (factor < 1)
        throw Error(ErrorCode::InvalidArgument, "refinement factor must be >= 1");
    if (factor == 1)
        return density;
    GridDensity out;
    out.cols = density.cols * factor;
    out.rows = density.rows * factor;
    out.cell_side = density.cell_side / factor;
    out.origin = density.origin;
    out.cell_mass.resize(static_cast<std::size_t>(out.cols) * static_cast<std::size_t>(out.rows));
    double const share = 1.0 / (static_cast<double>(factor) * static_cast<double>(factor));
    for (int row = 0; row < out.rows; ++row)
        for (int col = 0; col < out.cols; ++col)
            out.cell_mass[out.index(col, row)] =
                density.cell_mass[density.index(col / factor, row / factor)] * share;
    return out;
}

} // namespace semidot
