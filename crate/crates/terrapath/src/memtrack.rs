//! Peak-allocation instrumentation for the memory-consumption metric.
//!
//! [`TrackingAllocator`] wraps the system allocator and maintains the
//! current and peak live byte counts. Binaries that want per-plan memory
//! numbers install it:
//!
//! ```ignore
//! #[global_allocator]
//! static ALLOC: terrapath::memtrack::TrackingAllocator =
//!     terrapath::memtrack::TrackingAllocator;
//! ```
//!
//! Without it, [`measure_peak`] reports 0 KiB and everything else works
//! unchanged. The measurement is a process-wide live-allocation delta; run
//! trials sequentially for clean readings.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);
static INSTALLED: AtomicBool = AtomicBool::new(false);

pub struct TrackingAllocator;

unsafe impl GlobalAlloc for TrackingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let ptr = unsafe { System.alloc(layout) };
        if !ptr.is_null() {
            INSTALLED.store(true, Ordering::Relaxed);
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        ptr
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

/// True once the tracking allocator has served an allocation in this
/// process.
pub fn is_active() -> bool {
    INSTALLED.load(Ordering::Relaxed)
}

/// Run `f` and report its peak live-allocation delta in KiB (0 when the
/// tracking allocator is not installed).
pub fn measure_peak<T>(f: impl FnOnce() -> T) -> (T, u64) {
    if !is_active() {
        return (f(), 0);
    }
    let base = CURRENT.load(Ordering::Relaxed);
    PEAK.store(base, Ordering::Relaxed);
    let out = f();
    let peak = PEAK.load(Ordering::Relaxed);
    (out, (peak.saturating_sub(base) / 1024) as u64)
}
