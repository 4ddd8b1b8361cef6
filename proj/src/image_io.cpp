#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>

// jpeglib.h needs size_t and FILE declared first
#include <jpeglib.h>

#include "freqmask/image.hpp"

namespace freqmask {

namespace {

std::vector<unsigned char> to_bytes(const ImageBuffer& image) {
  std::vector<unsigned char> bytes(image.data().size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = quantize_8bit(image.data()[i]);
  return bytes;
}

ImageBuffer from_bytes(std::size_t width, std::size_t height, std::size_t channels,
                       const std::vector<unsigned char>& bytes) {
  std::vector<double> data(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) data[i] = static_cast<double>(bytes[i]) / 255.0;
  return ImageBuffer(width, height, channels, std::move(data));
}

bool is_png(const std::vector<unsigned char>& b) {
  static constexpr unsigned char sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

bool is_jpeg(const std::vector<unsigned char>& b) { return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF; }

ImageBuffer decode_png(const std::vector<unsigned char>& bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    throw CorruptImageError(std::string("corrupt PNG: ") + img.message);
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw CorruptImageError("corrupt PNG: " + msg);
  }
  return from_bytes(img.width, img.height, color ? 3 : 1, pixels);
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Only trivially destructible locals live in the setjmp frames below; all
// owning buffers are passed in from the caller.
bool decode_jpeg_raw(const std::vector<unsigned char>& bytes, std::vector<unsigned char>& pixels, std::size_t& width,
                     std::size_t& height, std::size_t& channels, char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    std::strncpy(message, jerr.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = cinfo.output_width;
  height = cinfo.output_height;
  channels = static_cast<std::size_t>(cinfo.output_components);
  pixels.resize(width * height * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

bool encode_jpeg_raw(const std::vector<unsigned char>& pixels, std::size_t width, std::size_t height,
                     std::size_t channels, int quality, unsigned char** out, unsigned long* out_size, char* message) {
  jpeg_compress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    std::strncpy(message, jerr.message, JMSG_LENGTH_MAX);
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, out, out_size);
  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = static_cast<int>(channels);
  cinfo.in_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  // keep chroma at full resolution; subsampling is a large loss on small textured images
  for (int i = 0; i < cinfo.num_components; ++i) cinfo.comp_info[i].h_samp_factor = cinfo.comp_info[i].v_samp_factor = 1;
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    auto row = const_cast<JSAMPROW>(pixels.data() + static_cast<std::size_t>(cinfo.next_scanline) * width * channels);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ImageWriteError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageWriteError("write failed: " + path.string());
}

}  // namespace

std::vector<unsigned char> encode_png(const ImageBuffer& image) {
  const auto pixels = to_bytes(image);
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, pixels.data(), 0, nullptr))
    throw ImageWriteError(std::string("PNG encode failed: ") + img.message);
  std::vector<unsigned char> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, pixels.data(), 0, nullptr))
    throw ImageWriteError(std::string("PNG encode failed: ") + img.message);
  out.resize(size);
  return out;
}

std::vector<unsigned char> encode_jpeg(const ImageBuffer& image, int quality) {
  if (quality < 1 || quality > 100) throw std::invalid_argument("JPEG quality must lie in [1,100]");
  const auto pixels = to_bytes(image);
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  char message[JMSG_LENGTH_MAX] = {};
  const bool ok = encode_jpeg_raw(pixels, image.width(), image.height(), image.channels(), quality, &buffer, &size, message);
  std::vector<unsigned char> out;
  if (ok) out.assign(buffer, buffer + size);
  std::free(buffer);
  if (!ok) throw ImageWriteError(std::string("JPEG encode failed: ") + message);
  return out;
}

ImageBuffer decode_image(const std::vector<unsigned char>& bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_jpeg(bytes)) {
    std::vector<unsigned char> pixels;
    std::size_t w = 0, h = 0, c = 0;
    char message[JMSG_LENGTH_MAX] = {};
    if (!decode_jpeg_raw(bytes, pixels, w, h, c, message)) throw CorruptImageError(std::string("corrupt JPEG: ") + message);
    if (c != 1 && c != 3) throw UnsupportedFormatError("unsupported JPEG component count");
    return from_bytes(w, h, c, pixels);
  }
  throw UnsupportedFormatError("not a PNG or JPEG stream");
}

ImageBuffer load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw ImageNotFoundError("no such image file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageNotFoundError("cannot open image file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const UnsupportedFormatError& e) {
    throw UnsupportedFormatError(path.string() + ": " + e.what());
  } catch (const CorruptImageError& e) {
    throw CorruptImageError(path.string() + ": " + e.what());
  }
}

void save_image(const ImageBuffer& image, const std::filesystem::path& path, ImageFormat format, int quality) {
  if (image.empty()) throw std::invalid_argument("cannot save an empty image");
  write_file(path, format == ImageFormat::png ? encode_png(image) : encode_jpeg(image, quality));
}

ImageBuffer jpeg_compress(const ImageBuffer& image, int quality) { return decode_image(encode_jpeg(image, quality)); }

}  // namespace freqmask
