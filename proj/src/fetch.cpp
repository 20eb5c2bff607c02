#include <fstream>

#include "nneten/error.hpp"
#include "nneten/mnist_io.hpp"

#ifdef NNETEN_WITH_FETCH
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#endif

namespace nneten::mnist {
namespace fs = std::filesystem;

namespace {

bool is_image_file(std::string_view name) { return name.find("images") != std::string_view::npos; }

// Parses the payload as the file it claims to be. Throws on any defect.
std::vector<std::uint8_t> validated_payload(std::string_view name, ByteSpan bytes) {
  auto raw = is_gzip(bytes) ? gunzip(bytes) : std::vector<std::uint8_t>(bytes.begin(), bytes.end());
  if (is_image_file(name)) {
    (void)parse_idx_images(raw);
  } else {
    (void)parse_idx_labels(raw);
  }
  return raw;
}

bool already_valid(const fs::path& directory, std::string_view name, fs::path& found) {
  auto existing = locate(directory, name);
  if (!existing) return false;
  try {
    const auto bytes = read_maybe_gzip(*existing);
    validated_payload(name, bytes);
  } catch (const Error&) {
    return false;
  }
  found = *existing;
  return true;
}

#ifdef NNETEN_WITH_FETCH
struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always ends with '/'
};

SplitUrl split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorKind::InvalidParam, "base URL lacks a scheme: " + std::string(url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = std::string(url.substr(0, path_start));
  out.path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
  if (out.path.back() != '/') out.path.push_back('/');
  return out;
}

std::optional<std::string> http_get(httplib::Client& client, const std::string& path) {
  auto response = client.Get(path);
  if (!response) {
    throw Error(ErrorKind::NetworkError,
                "GET " + path + " failed: " + httplib::to_string(response.error()));
  }
  if (response->status == 404) return std::nullopt;
  if (response->status != 200) {
    throw Error(ErrorKind::NetworkError,
                "GET " + path + " returned HTTP " + std::to_string(response->status));
  }
  return std::move(response->body);
}
#endif

}  // namespace

std::vector<fs::path> fetch_mnist(std::string_view base_url, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + directory.string() + ": " + ec.message());

  std::vector<fs::path> paths(kFileNames.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < kFileNames.size(); ++i) {
    if (!already_valid(directory, kFileNames[i], paths[i])) missing.push_back(i);
  }
  if (missing.empty()) return paths;

#ifdef NNETEN_WITH_FETCH
  const auto url = split_url(base_url);
  httplib::Client client(url.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(15);
  client.set_read_timeout(120);

  for (auto index : missing) {
    const auto name = kFileNames[index];
    auto body = http_get(client, url.path + std::string(name) + ".gz");
    if (!body) body = http_get(client, url.path + std::string(name));
    if (!body) {
      throw Error(ErrorKind::NetworkError, "mirror has neither " + std::string(name) + " nor " +
                                               std::string(name) + ".gz");
    }
    const ByteSpan bytes(reinterpret_cast<const std::uint8_t*>(body->data()), body->size());
    std::vector<std::uint8_t> raw;
    try {
      raw = validated_payload(name, bytes);
    } catch (const Error& e) {
      throw Error(ErrorKind::ValidationFailed,
                  "downloaded " + std::string(name) + " is invalid: " + e.what());
    }
    const auto target = directory / std::string(name);
    const auto partial = directory / (std::string(name) + ".part");
    {
      std::ofstream out(partial, std::ios::binary | std::ios::trunc);
      out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
      if (!out) throw Error(ErrorKind::IoError, "cannot write " + partial.string());
    }
    fs::rename(partial, target, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot move " + partial.string() + ": " + ec.message());
    paths[index] = target;
  }
  return paths;
#else
  (void)base_url;
  throw Error(ErrorKind::NetworkError,
              "built without the downloader; place the MNIST files in " + directory.string());
#endif
}

}  // namespace nneten::mnist
