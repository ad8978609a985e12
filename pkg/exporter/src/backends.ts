/**
 * Embedding backends.
 *
 * Model dims are fixed: the CLIP image tower emits 768-d vectors, the
 * AlexNet classifier head emits 1000-d logits. Two backend families
 * share those contracts:
 *
 * - "real": loads the actual pretrained model through optional
 *   dependencies (@xenova/transformers). Needs the package plus model
 *   weights on disk or network; never used in CI.
 * - "test": a deterministic stand-in for protocol and format work.
 *   It decodes the image, reduces it to an 8x8 grid of channel means,
 *   and expands that through a seeded pseudo-random projection to the
 *   model's dim. Same image bytes always produce the same vector.
 */

import type { DecodedImage } from './image.js';

export type ModelName = 'clip' | 'alexnet';
export type BackendKind = 'real' | 'test';

export const MODEL_DIMS: Record<ModelName, number> = {
  clip: 768,
  alexnet: 1000,
};

export interface Backend {
  model: ModelName;
  kind: BackendKind;
  dim: number;
  /** one-line description of the preprocessing, recorded in sidecars */
  preprocessing: string;
  embed(image: DecodedImage): Promise<Float32Array>;
}

// mulberry32: tiny deterministic PRNG, stable across platforms
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const GRID = 8;

function gridMeans(image: DecodedImage): Float64Array {
  const { width, height, channels, pixels } = image;
  const out = new Float64Array(GRID * GRID * 3);
  const counts = new Float64Array(GRID * GRID * 3);
  for (let y = 0; y < height; y++) {
    const gy = Math.min(Math.floor((y * GRID) / height), GRID - 1);
    for (let x = 0; x < width; x++) {
      const gx = Math.min(Math.floor((x * GRID) / width), GRID - 1);
      for (let c = 0; c < 3; c++) {
        const src = channels === 1 ? pixels[(y * width + x)] : pixels[(y * width + x) * channels + Math.min(c, channels - 1)];
        const k = (gy * GRID + gx) * 3 + c;
        out[k] += src / 255;
        counts[k] += 1;
      }
    }
  }
  for (let k = 0; k < out.length; k++) out[k] /= counts[k] || 1;
  return out;
}

class TestBackend implements Backend {
  readonly kind: BackendKind = 'test';
  readonly dim: number;
  readonly preprocessing =
    `decode to 8-bit pixels, ${GRID}x${GRID} channel-mean grid scaled to [0,1], seeded pseudo-random projection`;
  private readonly matrix: Float64Array;

  constructor(readonly model: ModelName) {
    this.dim = MODEL_DIMS[model];
    const features = GRID * GRID * 3;
    // model-specific seed so clip and alexnet vectors are unrelated
    const rand = mulberry32(model === 'clip' ? 0x51ca9e11 : 0xa1e8ce77);
    this.matrix = new Float64Array(this.dim * features);
    for (let i = 0; i < this.matrix.length; i++) {
      // sum of uniforms, roughly gaussian, zero mean
      this.matrix[i] = (rand() + rand() + rand() + rand() - 2) / Math.sqrt(features);
    }
  }

  async embed(image: DecodedImage): Promise<Float32Array> {
    const features = gridMeans(image);
    const out = new Float32Array(this.dim);
    for (let row = 0; row < this.dim; row++) {
      let acc = 0;
      const base = row * features.length;
      for (let k = 0; k < features.length; k++) {
        acc += this.matrix[base + k] * features[k];
      }
      out[row] = Math.fround(acc);
    }
    return out;
  }
}

class RealBackend implements Backend {
  readonly kind: BackendKind = 'real';
  readonly dim: number;
  readonly preprocessing: string;
  private pipe: ((input: unknown) => Promise<{ data: ArrayLike<number> }>) | null = null;

  constructor(readonly model: ModelName) {
    this.dim = MODEL_DIMS[model];
    this.preprocessing =
      model === 'clip'
        ? 'model processor defaults: resize 224, center crop, CLIP channel normalization'
        : 'model processor defaults: resize 256, center crop 224, ImageNet normalization; pre-softmax logits';
  }

  private async load(): Promise<void> {
    if (this.pipe) return;
    let transformers: any;
    try {
      transformers = await import('@xenova/transformers' as string);
    } catch {
      throw new Error(
        `model load error: the '${this.model}' real backend needs the optional ` +
        `@xenova/transformers dependency and downloaded weights; ` +
        `use --backend test for a deterministic stand-in`,
      );
    }
    const repo = this.model === 'clip' ? 'Xenova/clip-vit-large-patch14' : 'Xenova/alexnet';
    const task = this.model === 'clip' ? 'image-feature-extraction' : 'image-classification';
    this.pipe = await transformers.pipeline(task, repo);
  }

  async embed(image: DecodedImage): Promise<Float32Array> {
    await this.load();
    const out = await this.pipe!(image);
    const values = Float32Array.from(Array.from(out.data, Number));
    if (values.length !== this.dim) {
      throw new Error(`model returned dim ${values.length}, expected ${this.dim}`);
    }
    return values;
  }
}

export function loadBackend(model: ModelName, kind: BackendKind): Backend {
  if (!(model in MODEL_DIMS)) throw new Error(`unknown model ${model}`);
  return kind === 'test' ? new TestBackend(model) : new RealBackend(model);
}
