// Process-global allocation accounting for binaries that want bench memory
// figures. Linking this translation unit replaces operator new/delete, so it
// must only ever be linked into our own executables — never into the shared
// library loaded by a host interpreter.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <malloc.h>
#include <new>

#include "qboot/simulation.hpp"

namespace {

std::atomic<std::uint64_t> g_total{0};
std::atomic<std::uint64_t> g_live{0};
std::atomic<std::uint64_t> g_peak{0};

void note_alloc(void* ptr) noexcept {
  if (ptr == nullptr) return;
  const std::uint64_t size = malloc_usable_size(ptr);
  g_total.fetch_add(size, std::memory_order_relaxed);
  const std::uint64_t live =
      g_live.fetch_add(size, std::memory_order_relaxed) + size;
  std::uint64_t peak = g_peak.load(std::memory_order_relaxed);
  while (live > peak &&
         !g_peak.compare_exchange_weak(peak, live, std::memory_order_relaxed)) {
  }
}

void note_free(void* ptr) noexcept {
  if (ptr == nullptr) return;
  g_live.fetch_sub(malloc_usable_size(ptr), std::memory_order_relaxed);
}

void* checked_alloc(std::size_t size) {
  void* ptr = std::malloc(size == 0 ? 1 : size);
  if (ptr == nullptr) throw std::bad_alloc();
  note_alloc(ptr);
  return ptr;
}

void* checked_aligned_alloc(std::size_t size, std::size_t alignment) {
  void* ptr = nullptr;
  if (posix_memalign(&ptr, alignment, size == 0 ? alignment : size) != 0) {
    throw std::bad_alloc();
  }
  note_alloc(ptr);
  return ptr;
}

void tracked_free(void* ptr) noexcept {
  if (ptr == nullptr) return;
  note_free(ptr);
  std::free(ptr);
}

void probe_reset() {
  g_total.store(0, std::memory_order_relaxed);
  g_peak.store(g_live.load(std::memory_order_relaxed),
               std::memory_order_relaxed);
}

std::uint64_t probe_total() { return g_total.load(std::memory_order_relaxed); }
std::uint64_t probe_live() { return g_live.load(std::memory_order_relaxed); }
std::uint64_t probe_peak() { return g_peak.load(std::memory_order_relaxed); }

constexpr qboot::AllocProbe kProbe = {&probe_reset, &probe_total, &probe_live,
                                      &probe_peak};

[[maybe_unused]] const bool g_registered = [] {
  qboot::set_alloc_probe(&kProbe);
  return true;
}();

}  // namespace

void* operator new(std::size_t size) { return checked_alloc(size); }
void* operator new[](std::size_t size) { return checked_alloc(size); }

void* operator new(std::size_t size, const std::nothrow_t&) noexcept {
  try {
    return checked_alloc(size);
  } catch (...) {
    return nullptr;
  }
}
void* operator new[](std::size_t size, const std::nothrow_t&) noexcept {
  return operator new(size, std::nothrow);
}

void* operator new(std::size_t size, std::align_val_t alignment) {
  return checked_aligned_alloc(size, static_cast<std::size_t>(alignment));
}
void* operator new[](std::size_t size, std::align_val_t alignment) {
  return checked_aligned_alloc(size, static_cast<std::size_t>(alignment));
}
void* operator new(std::size_t size, std::align_val_t alignment,
                   const std::nothrow_t&) noexcept {
  try {
    return checked_aligned_alloc(size, static_cast<std::size_t>(alignment));
  } catch (...) {
    return nullptr;
  }
}
void* operator new[](std::size_t size, std::align_val_t alignment,
                     const std::nothrow_t&) noexcept {
  return operator new(size, alignment, std::nothrow);
}

void operator delete(void* ptr) noexcept { tracked_free(ptr); }
void operator delete[](void* ptr) noexcept { tracked_free(ptr); }
void operator delete(void* ptr, std::size_t) noexcept { tracked_free(ptr); }
void operator delete[](void* ptr, std::size_t) noexcept { tracked_free(ptr); }
void operator delete(void* ptr, const std::nothrow_t&) noexcept {
  tracked_free(ptr);
}
void operator delete[](void* ptr, const std::nothrow_t&) noexcept {
  tracked_free(ptr);
}
void operator delete(void* ptr, std::align_val_t) noexcept {
  tracked_free(ptr);
}
void operator delete[](void* ptr, std::align_val_t) noexcept {
  tracked_free(ptr);
}
void operator delete(void* ptr, std::size_t, std::align_val_t) noexcept {
  tracked_free(ptr);
}
void operator delete[](void* ptr, std::size_t, std::align_val_t) noexcept {
  tracked_free(ptr);
}
void operator delete(void* ptr, std::align_val_t,
                     const std::nothrow_t&) noexcept {
  tracked_free(ptr);
}
void operator delete[](void* ptr, std::align_val_t,
                       const std::nothrow_t&) noexcept {
  tracked_free(ptr);
}
