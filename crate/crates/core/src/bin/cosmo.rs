// Training frees and reallocates multi-megabyte planes every epoch; the system
// allocator hands them back to the kernel each time.
#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

fn main() {
    std::process::exit(cosmo::cli::main_with(std::env::args_os()));
}
