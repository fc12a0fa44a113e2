// Wire codec for the guidance link. Little-endian layout:
//   header: magic "CGP1" (4 B) | kind (1 B) | seq (u32) | count (u16) = 11 B
//   per pose: x, y, z, heading as float64 = 32 B
// An odometry message is a path message of kind Odometry carrying one pose.
#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <vector>

#include "coguide/frames.hpp"

namespace coguide::sim {

enum class MessageKind : std::uint8_t { Odometry = 0, PathMsg = 1 };

struct WireMessage {
  MessageKind kind = MessageKind::PathMsg;
  std::uint32_t seq = 0;
  std::vector<Pose> poses;  // frame is implied by the channel, not on the wire
};

constexpr std::size_t kHeaderBytes = 11;
constexpr std::size_t kPoseBytes = 32;

inline std::size_t message_bytes(std::size_t pose_count) {
  return kHeaderBytes + kPoseBytes * pose_count;
}

namespace codec_detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

inline double get_f64(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace codec_detail

inline std::vector<std::uint8_t> encode_message(const WireMessage& msg) {
  detail::require(msg.poses.size() <= 0xFFFF, "encode: path too long for u16 count");
  std::vector<std::uint8_t> out;
  out.reserve(message_bytes(msg.poses.size()));
  out.push_back('C');
  out.push_back('G');
  out.push_back('P');
  out.push_back('1');
  out.push_back(static_cast<std::uint8_t>(msg.kind));
  codec_detail::put_u32(out, msg.seq);
  out.push_back(static_cast<std::uint8_t>(msg.poses.size() & 0xFF));
  out.push_back(static_cast<std::uint8_t>(msg.poses.size() >> 8));
  for (const Pose& p : msg.poses) {
    codec_detail::put_f64(out, p.position.x);
    codec_detail::put_f64(out, p.position.y);
    codec_detail::put_f64(out, p.position.z);
    codec_detail::put_f64(out, p.heading);
  }
  return out;
}

inline std::vector<std::uint8_t> encode_path(const Path& path, std::uint32_t seq) {
  return encode_message({MessageKind::PathMsg, seq, path.poses});
}

inline std::vector<std::uint8_t> encode_odometry(const Pose& pose, std::uint32_t seq) {
  return encode_message({MessageKind::Odometry, seq, {pose}});
}

/// Exact inverse of encode; nullopt on bad magic, bad kind, or truncation.
/// Decoded poses carry the caller-supplied frame (not on the wire).
inline std::optional<WireMessage> decode_message(const std::vector<std::uint8_t>& data,
                                                 const FrameId& frame = FrameId::S()) {
  if (data.size() < kHeaderBytes) return std::nullopt;
  if (data[0] != 'C' || data[1] != 'G' || data[2] != 'P' || data[3] != '1') return std::nullopt;
  if (data[4] > 1) return std::nullopt;
  WireMessage msg;
  msg.kind = static_cast<MessageKind>(data[4]);
  msg.seq = codec_detail::get_u32(&data[5]);
  const std::size_t count = data[9] | (static_cast<std::size_t>(data[10]) << 8);
  if (data.size() != message_bytes(count)) return std::nullopt;
  msg.poses.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* p = &data[kHeaderBytes + i * kPoseBytes];
    Pose pose;
    pose.position = {codec_detail::get_f64(p), codec_detail::get_f64(p + 8),
                     codec_detail::get_f64(p + 16)};
    pose.heading = codec_detail::get_f64(p + 24);
    pose.frame = frame;
    msg.poses.push_back(pose);
  }
  return msg;
}

}  // namespace coguide::sim
