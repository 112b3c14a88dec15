#pragma once

namespace mmw {

/// Keeps freed signal buffers in the heap instead of returning them to the OS, so the
/// per-burst temporaries do not page-fault on every reuse. No-op outside glibc.
void tune_allocator();

}  // namespace mmw
