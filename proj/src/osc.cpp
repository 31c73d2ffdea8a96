#include "touchcore/osc.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string_view>

namespace touchcore {
namespace {

constexpr std::string_view kBundleTag{"#bundle\0", 8};
constexpr int kMaxBundleDepth = 16;

std::size_t padded(std::size_t n) { return (n + 3) & ~std::size_t{3}; }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_string(std::vector<std::uint8_t>& out, std::string_view s) {
  if (s.find('\0') != std::string_view::npos) {
    throw OscError(OscErrc::InvalidString, "OSC string contains an embedded NUL");
  }
  out.insert(out.end(), s.begin(), s.end());
  // At least one terminating NUL, then zero padding to a 4-byte boundary.
  out.resize(out.size() + (padded(s.size() + 1) - s.size()), 0);
}

void put_blob(std::vector<std::uint8_t>& out, const OscBlob& blob) {
  put_u32(out, static_cast<std::uint32_t>(blob.bytes.size()));
  out.insert(out.end(), blob.bytes.begin(), blob.bytes.end());
  out.resize(out.size() + (padded(blob.bytes.size()) - blob.bytes.size()), 0);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

  std::uint32_t u32() {
    need(4, "32-bit field");
    const auto* p = data_.data() + pos_;
    pos_ += 4;
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  }

  std::uint64_t u64() {
    const std::uint64_t hi = u32();
    return (hi << 32) | u32();
  }

  std::string string() {
    const auto* begin = reinterpret_cast<const char*>(data_.data() + pos_);
    const auto* end = static_cast<const char*>(std::memchr(begin, '\0', remaining()));
    if (end == nullptr) {
      throw OscError(OscErrc::Truncated, "unterminated OSC string");
    }
    const auto len = static_cast<std::size_t>(end - begin);
    std::string s(begin, len);
    need(padded(len + 1), "string padding");
    pos_ += padded(len + 1);
    return s;
  }

  std::span<const std::uint8_t> bytes(std::size_t n, const char* what) {
    need(n, what);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw OscError(OscErrc::Truncated, std::string("OSC packet truncated reading ") + what);
    }
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

OscMessage decode_message(std::span<const std::uint8_t> data) {
  Reader in(data);
  OscMessage msg;
  msg.address = in.string();
  if (msg.address.empty() || msg.address.front() != '/') {
    throw OscError(OscErrc::InvalidAddress, "OSC address must begin with '/'");
  }
  if (in.done()) {
    return msg;  // pre-1.0 senders may omit the type tag string
  }
  const std::string tags = in.string();
  if (tags.empty() || tags.front() != ',') {
    throw OscError(OscErrc::UnknownTypeTag, "OSC type tag string must begin with ','");
  }
  msg.args.reserve(tags.size() - 1);
  for (std::size_t i = 1; i < tags.size(); ++i) {
    switch (tags[i]) {
      case 'i':
        msg.args.emplace_back(static_cast<std::int32_t>(in.u32()));
        break;
      case 'f':
        msg.args.emplace_back(std::bit_cast<float>(in.u32()));
        break;
      case 's':
        msg.args.emplace_back(in.string());
        break;
      case 'b': {
        const auto size = static_cast<std::int32_t>(in.u32());
        if (size < 0) {
          throw OscError(OscErrc::Truncated, "negative OSC blob size");
        }
        const auto n = static_cast<std::size_t>(size);
        const auto body = in.bytes(n, "blob");
        in.bytes(padded(n) - n, "blob padding");
        msg.args.emplace_back(OscBlob{{body.begin(), body.end()}});
        break;
      }
      default:
        throw OscError(OscErrc::UnknownTypeTag,
                       std::string("unsupported OSC type tag '") + tags[i] + "'");
    }
  }
  return msg;
}

bool is_bundle(std::span<const std::uint8_t> data) {
  return data.size() >= kBundleTag.size() &&
         std::equal(kBundleTag.begin(), kBundleTag.end(), data.begin());
}

void decode_into(std::span<const std::uint8_t> data, std::vector<OscMessage>& out, int depth) {
  if (data.empty()) {
    throw OscError(OscErrc::Truncated, "empty OSC packet");
  }
  if (data.size() % 4 != 0) {
    throw OscError(OscErrc::BadPadding, "OSC packet length is not a multiple of 4");
  }
  if (!is_bundle(data)) {
    out.push_back(decode_message(data));
    return;
  }
  if (depth >= kMaxBundleDepth) {
    throw OscError(OscErrc::NestingTooDeep, "OSC bundles nested too deeply");
  }
  Reader in(data);
  in.bytes(kBundleTag.size(), "bundle tag");
  in.u64();  // time tag, delivery is immediate
  while (!in.done()) {
    const auto size = static_cast<std::int32_t>(in.u32());
    if (size < 0 || static_cast<std::size_t>(size) > in.remaining()) {
      throw OscError(OscErrc::Truncated, "OSC bundle element exceeds packet");
    }
    decode_into(in.bytes(static_cast<std::size_t>(size), "bundle element"), out, depth + 1);
  }
}

bool args_equal(const OscArgument& a, const OscArgument& b) {
  if (a.index() != b.index()) {
    return false;
  }
  if (const auto* fa = std::get_if<float>(&a)) {
    return std::bit_cast<std::uint32_t>(*fa) == std::bit_cast<std::uint32_t>(std::get<float>(b));
  }
  return a == b;
}

}  // namespace

bool operator==(const OscMessage& a, const OscMessage& b) {
  return a.address == b.address &&
         std::equal(a.args.begin(), a.args.end(), b.args.begin(), b.args.end(), args_equal);
}

std::vector<std::uint8_t> encode_osc_message(const OscMessage& msg) {
  if (msg.address.empty() || msg.address.front() != '/') {
    throw OscError(OscErrc::InvalidAddress, "OSC address must begin with '/'");
  }
  std::string tags(",");
  for (const auto& arg : msg.args) {
    static constexpr char kTags[] = {'i', 'f', 's', 'b'};
    tags.push_back(kTags[arg.index()]);
  }

  std::vector<std::uint8_t> out;
  out.reserve(padded(msg.address.size() + 1) + padded(tags.size() + 1) + 8 * msg.args.size());
  put_string(out, msg.address);
  put_string(out, tags);
  for (const auto& arg : msg.args) {
    std::visit(
        [&out](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::int32_t>) {
            put_u32(out, static_cast<std::uint32_t>(v));
          } else if constexpr (std::is_same_v<T, float>) {
            put_u32(out, std::bit_cast<std::uint32_t>(v));
          } else if constexpr (std::is_same_v<T, std::string>) {
            put_string(out, v);
          } else {
            put_blob(out, v);
          }
        },
        arg);
  }
  return out;
}

std::vector<std::uint8_t> encode_osc_bundle(std::span<const OscMessage> msgs,
                                            std::uint64_t time_tag) {
  std::vector<std::uint8_t> out(kBundleTag.begin(), kBundleTag.end());
  put_u32(out, static_cast<std::uint32_t>(time_tag >> 32));
  put_u32(out, static_cast<std::uint32_t>(time_tag));
  for (const auto& msg : msgs) {
    const auto element = encode_osc_message(msg);
    put_u32(out, static_cast<std::uint32_t>(element.size()));
    out.insert(out.end(), element.begin(), element.end());
  }
  return out;
}

std::vector<OscMessage> decode_osc_packet(std::span<const std::uint8_t> packet) {
  std::vector<OscMessage> out;
  decode_into(packet, out, 0);
  return out;
}

}  // namespace touchcore
