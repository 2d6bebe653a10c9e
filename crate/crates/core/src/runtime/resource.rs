//! Memory resources and the buffers drawn from them.

use std::alloc::{self, Layout};
use std::fmt;
use std::ops::{Deref, DerefMut};
use std::ptr::NonNull;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};

/// Allocation callbacks used for library-owned buffers (handle optimization
/// data and staged operation state).
pub trait MemoryResource: Send + Sync + fmt::Debug {
    /// Returns a block for `layout`; `layout.size()` is never zero.
    fn allocate(&self, layout: Layout) -> NonNull<u8>;

    /// # Safety
    ///
    /// `ptr` must come from `allocate` on this resource with the same layout
    /// and must not be used afterwards.
    unsafe fn deallocate(&self, ptr: NonNull<u8>, layout: Layout);
}

/// The global allocator.
#[derive(Debug, Default, Clone, Copy)]
pub struct SystemResource;

impl MemoryResource for SystemResource {
    fn allocate(&self, layout: Layout) -> NonNull<u8> {
        // SAFETY: callers never request zero-sized blocks.
        let ptr = unsafe { alloc::alloc(layout) };
        NonNull::new(ptr).unwrap_or_else(|| alloc::handle_alloc_error(layout))
    }

    unsafe fn deallocate(&self, ptr: NonNull<u8>, layout: Layout) {
        alloc::dealloc(ptr.as_ptr(), layout)
    }
}

/// Shared default resource.
pub fn default_resource() -> Arc<dyn MemoryResource> {
    static DEFAULT: OnceLock<Arc<dyn MemoryResource>> = OnceLock::new();
    DEFAULT.get_or_init(|| Arc::new(SystemResource)).clone()
}

/// Forwards to the system allocator and counts traffic, for leak checks.
#[derive(Debug, Default)]
pub struct CountingResource {
    allocations: AtomicUsize,
    deallocations: AtomicUsize,
    live_bytes: AtomicUsize,
    peak_bytes: AtomicUsize,
}

impl CountingResource {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn allocations(&self) -> usize {
        self.allocations.load(Ordering::SeqCst)
    }

    pub fn deallocations(&self) -> usize {
        self.deallocations.load(Ordering::SeqCst)
    }

    /// Allocations not yet returned.
    pub fn outstanding(&self) -> usize {
        self.allocations() - self.deallocations()
    }

    pub fn live_bytes(&self) -> usize {
        self.live_bytes.load(Ordering::SeqCst)
    }

    pub fn peak_bytes(&self) -> usize {
        self.peak_bytes.load(Ordering::SeqCst)
    }
}

impl MemoryResource for CountingResource {
    fn allocate(&self, layout: Layout) -> NonNull<u8> {
        self.allocations.fetch_add(1, Ordering::SeqCst);
        let live = self.live_bytes.fetch_add(layout.size(), Ordering::SeqCst) + layout.size();
        self.peak_bytes.fetch_max(live, Ordering::SeqCst);
        SystemResource.allocate(layout)
    }

    unsafe fn deallocate(&self, ptr: NonNull<u8>, layout: Layout) {
        self.deallocations.fetch_add(1, Ordering::SeqCst);
        self.live_bytes.fetch_sub(layout.size(), Ordering::SeqCst);
        SystemResource.deallocate(ptr, layout)
    }
}

/// Fixed-length buffer of `Copy` elements owned through a [`MemoryResource`].
pub struct ResBuf<T: Copy> {
    ptr: NonNull<T>,
    len: usize,
    resource: Arc<dyn MemoryResource>,
}

// SAFETY: ResBuf owns its elements like a Vec does.
unsafe impl<T: Copy + Send> Send for ResBuf<T> {}
unsafe impl<T: Copy + Sync> Sync for ResBuf<T> {}

impl<T: Copy> ResBuf<T> {
    pub fn filled(resource: &Arc<dyn MemoryResource>, len: usize, value: T) -> Self {
        let ptr = match Self::layout(len) {
            None => NonNull::dangling(),
            Some(layout) => resource.allocate(layout).cast::<T>(),
        };
        for i in 0..len {
            // SAFETY: in bounds of a fresh allocation of `len` elements.
            unsafe { ptr.as_ptr().add(i).write(value) };
        }
        ResBuf {
            ptr,
            len,
            resource: resource.clone(),
        }
    }

    pub fn from_slice(resource: &Arc<dyn MemoryResource>, src: &[T]) -> Self {
        let ptr = match Self::layout(src.len()) {
            None => NonNull::dangling(),
            Some(layout) => resource.allocate(layout).cast::<T>(),
        };
        // SAFETY: fresh allocation of src.len() elements, no overlap.
        unsafe { std::ptr::copy_nonoverlapping(src.as_ptr(), ptr.as_ptr(), src.len()) };
        ResBuf {
            ptr,
            len: src.len(),
            resource: resource.clone(),
        }
    }

    fn layout(len: usize) -> Option<Layout> {
        let layout = Layout::array::<T>(len).expect("buffer size overflow");
        (layout.size() != 0).then_some(layout)
    }
}

impl<T: Copy> Deref for ResBuf<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        // SAFETY: ptr is valid for len initialized elements (or dangling with len 0).
        unsafe { std::slice::from_raw_parts(self.ptr.as_ptr(), self.len) }
    }
}

impl<T: Copy> DerefMut for ResBuf<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        // SAFETY: as above, and we hold the only reference.
        unsafe { std::slice::from_raw_parts_mut(self.ptr.as_ptr(), self.len) }
    }
}

impl<T: Copy> Drop for ResBuf<T> {
    fn drop(&mut self) {
        if let Some(layout) = Self::layout(self.len) {
            // SAFETY: allocated from this resource with this layout.
            unsafe { self.resource.deallocate(self.ptr.cast(), layout) };
        }
    }
}

impl<T: Copy + fmt::Debug> fmt::Debug for ResBuf<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}
