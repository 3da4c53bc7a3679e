//! Hardware cycle and instruction counters.
//!
//! On Linux this opens two user-space-only `perf_event_open` counters for
//! the calling thread. Anywhere else, or when the kernel refuses (container
//! seccomp policy, `perf_event_paranoid`), [`HwCounters::open`] returns
//! `None` and the harness falls back to wall time only.

/// Cycle and retired-instruction deltas for one measured region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterSample {
    pub cycles: u64,
    pub instructions: u64,
}

#[cfg(target_os = "linux")]
mod imp {
    use std::fs::File;
    use std::io::Read;
    use std::os::fd::{FromRawFd, OwnedFd, AsRawFd};

    use super::CounterSample;

    const PERF_TYPE_HARDWARE: u32 = 0;
    const PERF_COUNT_HW_CPU_CYCLES: u64 = 0;
    const PERF_COUNT_HW_INSTRUCTIONS: u64 = 1;

    const IOC_ENABLE: libc::c_ulong = 0x2400;
    const IOC_DISABLE: libc::c_ulong = 0x2401;
    const IOC_RESET: libc::c_ulong = 0x2403;

    // flag bits of perf_event_attr
    const DISABLED: u64 = 1 << 0;
    const EXCLUDE_KERNEL: u64 = 1 << 5;
    const EXCLUDE_HV: u64 = 1 << 6;

    /// `struct perf_event_attr`, layout version 5 (112 bytes).
    #[repr(C)]
    #[derive(Default)]
    struct PerfEventAttr {
        type_: u32,
        size: u32,
        config: u64,
        sample_period: u64,
        sample_type: u64,
        read_format: u64,
        flags: u64,
        wakeup_events: u32,
        bp_type: u32,
        config1: u64,
        config2: u64,
        branch_sample_type: u64,
        sample_regs_user: u64,
        sample_stack_user: u32,
        clockid: i32,
        sample_regs_intr: u64,
        aux_watermark: u32,
        sample_max_stack: u16,
        reserved: u16,
    }

    fn open_counter(config: u64) -> Option<File> {
        let attr = PerfEventAttr {
            type_: PERF_TYPE_HARDWARE,
            size: std::mem::size_of::<PerfEventAttr>() as u32,
            config,
            flags: DISABLED | EXCLUDE_KERNEL | EXCLUDE_HV,
            ..Default::default()
        };
        // SAFETY: attr is a valid, fully initialized perf_event_attr.
        let fd = unsafe {
            libc::syscall(
                libc::SYS_perf_event_open,
                &attr as *const PerfEventAttr,
                0 as libc::pid_t,
                -1 as libc::c_int,
                -1 as libc::c_int,
                0 as libc::c_ulong,
            )
        };
        if fd < 0 {
            return None;
        }
        // SAFETY: the syscall returned a fresh descriptor we now own.
        Some(File::from(unsafe { OwnedFd::from_raw_fd(fd as i32) }))
    }

    fn ioctl(f: &File, req: libc::c_ulong) -> bool {
        // SAFETY: perf ioctls with a zero argument on a perf fd.
        unsafe { libc::ioctl(f.as_raw_fd(), req as _, 0) == 0 }
    }

    fn read(f: &mut File) -> Option<u64> {
        let mut buf = [0u8; 8];
        f.read_exact(&mut buf).ok()?;
        Some(u64::from_ne_bytes(buf))
    }

    pub struct HwCounters {
        cycles: File,
        instructions: File,
    }

    impl HwCounters {
        pub fn open() -> Option<Self> {
            let mut c = HwCounters {
                cycles: open_counter(PERF_COUNT_HW_CPU_CYCLES)?,
                instructions: open_counter(PERF_COUNT_HW_INSTRUCTIONS)?,
            };
            // A counter that opens but never ticks (some virtualized hosts)
            // is as good as absent.
            let probe = c.measure(|| std::hint::black_box((0..10_000u64).sum::<u64>()))?;
            (probe.instructions > 0 && probe.cycles > 0).then_some(c)
        }

        pub fn measure<R>(&mut self, f: impl FnOnce() -> R) -> Option<CounterSample> {
            for c in [&self.cycles, &self.instructions] {
                if !ioctl(c, IOC_RESET) {
                    return None;
                }
            }
            ioctl(&self.cycles, IOC_ENABLE);
            ioctl(&self.instructions, IOC_ENABLE);
            std::hint::black_box(f());
            ioctl(&self.instructions, IOC_DISABLE);
            ioctl(&self.cycles, IOC_DISABLE);
            Some(CounterSample {
                cycles: read(&mut self.cycles)?,
                instructions: read(&mut self.instructions)?,
            })
        }
    }
}

#[cfg(not(target_os = "linux"))]
mod imp {
    use super::CounterSample;

    pub struct HwCounters;

    impl HwCounters {
        pub fn open() -> Option<Self> {
            None
        }

        pub fn measure<R>(&mut self, _f: impl FnOnce() -> R) -> Option<CounterSample> {
            None
        }
    }
}

pub use imp::HwCounters;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counters_open_or_degrade() {
        match HwCounters::open() {
            Some(mut c) => {
                let s = c.measure(|| std::hint::black_box((0..100_000u64).sum::<u64>())).unwrap();
                assert!(s.instructions > 0);
                println!("counters available: {s:?}");
            }
            None => println!("hardware counters unavailable; wall time only"),
        }
    }
}
