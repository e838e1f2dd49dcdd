#pragma once

#include "fcbgp/binding.hpp"
#include "fcbgp/sync.hpp"

namespace fcbgp {

/// Human-readable dump of a fixture file: per record its tag, offset and
/// decoded fields followed by a hex dump of the body. Throws
/// kMalformedMessage with the absolute file offset of the first bad field.
std::string inspect_fixture(ByteView file);

std::string describe_update(const BgpUpdate& update);
std::string describe_binding(const BindingMessage& msg);
std::string describe_sync(const SyncMessage& msg);
std::string hex_dump(ByteView bytes, std::size_t base_offset = 0);

}  // namespace fcbgp
