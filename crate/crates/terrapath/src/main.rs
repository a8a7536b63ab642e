use terrapath::cli::dispatch;
use terrapath::memtrack::TrackingAllocator;

// Peak-allocation tracking backs the per-plan memory metric.
#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

fn main() {
    std::process::exit(dispatch(std::env::args_os()));
}
