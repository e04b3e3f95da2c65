// Stroke session model: ordered polylines with an undo/redo stack.

export interface Point {
  x: number;
  y: number;
}

export interface Stroke {
  points: Point[];
  width: number;
}

export class StrokeSession {
  readonly size: number;
  private strokes_: Stroke[] = [];
  private redoStack: Stroke[] = [];
  private active: Stroke | null = null;

  constructor(size: number) {
    this.size = size;
  }

  get strokes(): readonly Stroke[] {
    return this.strokes_;
  }

  get isEmpty(): boolean {
    return this.strokes_.length === 0;
  }

  begin(x: number, y: number, width = 2): void {
    this.active = { points: [{ x, y }], width };
    this.strokes_.push(this.active);
    // a new stroke invalidates anything that was undone
    this.redoStack = [];
  }

  extend(x: number, y: number): void {
    if (!this.active) return;
    this.active.points.push({ x, y });
  }

  end(): void {
    this.active = null;
  }

  undo(): void {
    this.end();
    const s = this.strokes_.pop();
    if (s) this.redoStack.push(s);
  }

  redo(): void {
    const s = this.redoStack.pop();
    if (s) this.strokes_.push(s);
  }

  clear(): void {
    this.end();
    this.strokes_ = [];
    this.redoStack = [];
  }

  /** Deep snapshot, used by tests to check undo/redo restores exact lists. */
  snapshot(): Stroke[] {
    return this.strokes_.map((s) => ({
      width: s.width,
      points: s.points.map((p) => ({ ...p })),
    }));
  }
}
