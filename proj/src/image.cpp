#include "fakecatcher/image.hpp"

#include <cstdio>
#include <fstream>

#include <png.h>

namespace fc {

namespace {

int read_pnm_int(std::istream& in) {
    // skips whitespace and '#' comments
    int ch = in.peek();
    while (ch == '#' || std::isspace(ch)) {
        if (ch == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            in.get();
        }
        ch = in.peek();
    }
    int value = 0;
    if (!(in >> value)) throw IngestError("malformed PNM header");
    return value;
}

ImageU8 load_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open image " + path.string());
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || (m1 != '5' && m1 != '6'))
        throw IngestError("unsupported PNM type in " + path.string());
    const bool color = m1 == '6';
    const int w = read_pnm_int(in);
    const int h = read_pnm_int(in);
    const int maxval = read_pnm_int(in);
    if (w <= 0 || h <= 0 || maxval != 255)
        throw IngestError("unsupported PNM dimensions/depth in " + path.string());
    in.get();  // single whitespace after the header
    const std::size_t npix = static_cast<std::size_t>(w) * h;
    std::vector<std::uint8_t> raw(npix * (color ? 3 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw IngestError("truncated PNM payload in " + path.string());
    ImageU8 img(w, h);
    if (color) {
        img.data = std::move(raw);
    } else {
        for (std::size_t i = 0; i < npix; ++i) {
            img.data[3 * i] = img.data[3 * i + 1] = img.data[3 * i + 2] = raw[i];
        }
    }
    return img;
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

ImageU8 load_png(const std::filesystem::path& path) {
    PngReadCloser ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IngestError("cannot open image " + path.string());
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IngestError("libpng init failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IngestError("libpng init failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw IngestError("failed to decode " + path.string());

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);
    const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
    const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    const int color_type = png_get_color_type(ctx.png, ctx.info);
    const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);

    if (bit_depth == 16) png_set_strip_16(ctx.png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(ctx.png);
    if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS))
        png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    ImageU8 img(w, h);
    const std::size_t rowbytes = png_get_rowbytes(ctx.png, ctx.info);
    if (rowbytes != static_cast<std::size_t>(w) * 3)
        throw IngestError("unexpected PNG row layout in " + path.string());
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = img.data.data() + static_cast<std::size_t>(y) * rowbytes;
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);
    return img;
}

}  // namespace

ImageU8 load_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IngestError("cannot open image " + path.string());
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    probe.close();
    if (magic[0] == 0x89 && magic[1] == 'P') return load_png(path);
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) return load_pnm(path);
    throw IngestError("unrecognized image format in " + path.string());
}

void save_ppm(const std::filesystem::path& path, const ImageU8& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
}

void save_pgm(const std::filesystem::path& path, const std::vector<std::uint8_t>& gray, int width,
              int height) {
    if (gray.size() != static_cast<std::size_t>(width) * height)
        throw ParamError("PGM payload does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()),
              static_cast<std::streamsize>(gray.size()));
}

std::vector<std::uint8_t> load_pgm(const std::filesystem::path& path, int& width, int& height) {
    ImageU8 img = load_image(path);
    width = img.width;
    height = img.height;
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = img.data[3 * i];
    return gray;
}

}  // namespace fc
