#pragma once

#include <cstdint>
#include <functional>

namespace qboot::detail {

/// Splits [0, total) into n_chunks contiguous ranges and runs fn(chunk,
/// begin, end) for each, distributing chunks over up to `threads` workers
/// (0 = hardware concurrency). The chunking is a pure function of (total,
/// n_chunks), so chunk-keyed randomness makes results independent of the
/// worker count. Exceptions propagate to the caller.
void run_chunked(std::uint64_t total, unsigned n_chunks, unsigned threads,
                 const std::function<void(unsigned chunk, std::uint64_t begin,
                                          std::uint64_t end)>& fn);

/// Fixed chunk counts keyed by use; constants so replays never depend on
/// hardware.
inline constexpr unsigned kCiChunks = 64;
inline constexpr unsigned kSimChunks = 128;

unsigned resolve_threads(unsigned threads);

}  // namespace qboot::detail
